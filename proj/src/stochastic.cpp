// SPDX-License-Identifier: Apache-2.0
#include "isac/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>
#include "json.hpp"

#include "isac/errors.hpp"

#ifndef ISAC_DATA_DIR
#define ISAC_DATA_DIR "data"
#endif

namespace isac {

using nlohmann::json;

namespace {

double log10_one_plus_ghz(double carrier_hz) { return std::log10(1.0 + carrier_hz / 1e9); }

FrequencyDependentLogNormal parse_lognormal(const json& j) {
    FrequencyDependentLogNormal p;
    p.mu_base = j.at("mu").at(0).get<double>();
    p.mu_slope = j.at("mu").at(1).get<double>();
    p.sigma_base = j.at("sigma").at(0).get<double>();
    p.sigma_slope = j.at("sigma").at(1).get<double>();
    return p;
}

ConditionTable parse_condition(const json& j) {
    ConditionTable c;
    c.clusters = j.at("clusters").get<std::size_t>();
    c.lg_ds = parse_lognormal(j.at("lg_ds"));
    c.lg_asd = parse_lognormal(j.at("lg_asd"));
    c.lg_asa = parse_lognormal(j.at("lg_asa"));
    c.lg_zsa = parse_lognormal(j.at("lg_zsa"));
    c.lg_zsd = parse_lognormal(j.at("lg_zsd"));
    c.sf_std_db = j.at("sf_std_db").get<double>();
    c.k_mu_db = j.at("k_db").at("mu").get<double>();
    c.k_sigma_db = j.at("k_db").at("sigma").get<double>();
    c.r_tau = j.at("r_tau").get<double>();
    c.xpr_mu_db = j.at("xpr_db").at("mu").get<double>();
    c.xpr_sigma_db = j.at("xpr_db").at("sigma").get<double>();
    c.c_asd_deg = j.at("c_asd_deg").get<double>();
    c.c_asa_deg = j.at("c_asa_deg").get<double>();
    c.c_zsa_deg = j.at("c_zsa_deg").get<double>();
    c.cluster_shadowing_std_db = j.at("cluster_shadowing_std_db").get<double>();
    c.zod_offset_deg = j.at("zod_offset_deg").get<double>();
    c.correlation_order = j.at("correlation_order").get<std::vector<std::string>>();
    const auto rows = j.at("correlation").get<std::vector<std::vector<double>>>();
    const auto n = static_cast<Eigen::Index>(c.correlation_order.size());
    if (static_cast<Eigen::Index>(rows.size()) != n)
        throw ConfigError("parameter table: correlation matrix size does not match correlation_order");
    c.correlation.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        if (static_cast<Eigen::Index>(rows[r].size()) != n)
            throw ConfigError("parameter table: correlation matrix is not square");
        for (Eigen::Index k = 0; k < n; ++k)
            c.correlation(r, k) = rows[r][k];
    }
    if (!c.correlation.isApprox(c.correlation.transpose()))
        throw ConfigError("parameter table: correlation matrix is not symmetric");
    return c;
}

std::map<std::size_t, double> parse_cluster_map(const json& j) {
    std::map<std::size_t, double> out;
    for (const auto& [key, value] : j.items())
        out[static_cast<std::size_t>(std::stoul(key))] = value.get<double>();
    return out;
}

ScenarioTable parse_table(const json& j) {
    ScenarioTable t;
    t.name = j.at("scenario").get<std::string>();
    t.rays_per_cluster = j.at("rays_per_cluster").get<std::size_t>();
    t.ray_offsets = j.at("ray_offsets").get<std::vector<double>>();
    if (t.ray_offsets.size() != t.rays_per_cluster)
        throw ConfigError("parameter table: ray_offsets length must equal rays_per_cluster");
    t.c_phi_nlos = parse_cluster_map(j.at("c_phi_nlos"));
    t.c_theta_nlos = parse_cluster_map(j.at("c_theta_nlos"));
    const auto& caps = j.at("angle_spread_caps_deg");
    t.cap_asd_deg = caps.at("asd").get<double>();
    t.cap_asa_deg = caps.at("asa").get<double>();
    t.cap_zsd_deg = caps.at("zsd").get<double>();
    t.cap_zsa_deg = caps.at("zsa").get<double>();
    t.los = parse_condition(j.at("conditions").at("los"));
    t.nlos = parse_condition(j.at("conditions").at("nlos"));
    return t;
}

double lookup(const std::map<std::size_t, double>& table, std::size_t clusters, const char* what) {
    const auto it = table.find(clusters);
    if (it == table.end())
        throw ConfigError(std::string("parameter table: no ") + what + " scaling for " + std::to_string(clusters) +
                          " clusters");
    return it->second;
}

} // namespace

double FrequencyDependentLogNormal::mean(double carrier_hz) const {
    return mu_base + mu_slope * log10_one_plus_ghz(carrier_hz);
}

double FrequencyDependentLogNormal::stddev(double carrier_hz) const {
    return sigma_base + sigma_slope * log10_one_plus_ghz(carrier_hz);
}

ScenarioTable ScenarioTable::load_from_string(const std::string& json_text) {
    try {
        return parse_table(json::parse(json_text));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("parameter table: ") + e.what());
    }
}

ScenarioTable ScenarioTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open parameter table " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return load_from_string(buffer.str());
}

const ScenarioTable& ScenarioTable::inh_office() {
    static const ScenarioTable table = load(default_table_path());
    return table;
}

std::filesystem::path default_table_path() {
    if (const char* env = std::getenv("ISAC_DATA_DIR"))
        return std::filesystem::path(env) / "inh_office.json";
    return std::filesystem::path(ISAC_DATA_DIR) / "inh_office.json";
}

double ClusterSet::total_power() const {
    return std::accumulate(clusters.begin(), clusters.end(), 0.0,
                           [](double acc, const Cluster& c) { return acc + c.power; });
}

std::size_t ClusterSet::ray_count() const {
    std::size_t n = 0;
    for (const auto& c : clusters)
        n += c.rays.size();
    return n;
}

LinkGeometry LinkGeometry::between(const Point3& tx, const Point3& rx) {
    return {los_angles(tx, rx), los_angles(rx, tx), distance_3d(tx, rx)};
}

LargeScaleParams draw_large_scale(const ScenarioTable& table, LinkCondition condition, double carrier_hz,
                                  RandomEngine& rng) {
    const ConditionTable& t = table.condition(condition);
    const auto n = t.correlation.rows();
    Eigen::LLT<Eigen::MatrixXd> llt(t.correlation);
    if (llt.info() != Eigen::Success)
        throw ConfigError("parameter table: LSP correlation matrix is not positive definite");

    Eigen::VectorXd independent(n);
    for (Eigen::Index k = 0; k < n; ++k)
        independent(k) = standard_normal(rng);
    const Eigen::VectorXd correlated = llt.matrixL() * independent;

    auto value = [&](const std::string& name) {
        const auto it = std::find(t.correlation_order.begin(), t.correlation_order.end(), name);
        if (it == t.correlation_order.end())
            return 0.0;
        return correlated(std::distance(t.correlation_order.begin(), it));
    };
    auto spread = [&](const FrequencyDependentLogNormal& p, const std::string& name, double cap_deg) {
        const double deg = std::pow(10.0, p.mean(carrier_hz) + p.stddev(carrier_hz) * value(name));
        return deg2rad(std::min(deg, cap_deg));
    };

    LargeScaleParams lsp;
    lsp.los = condition == LinkCondition::los;
    lsp.ds = std::pow(10.0, t.lg_ds.mean(carrier_hz) + t.lg_ds.stddev(carrier_hz) * value("ds"));
    lsp.asd = spread(t.lg_asd, "asd", table.cap_asd_deg);
    lsp.asa = spread(t.lg_asa, "asa", table.cap_asa_deg);
    lsp.zsd = spread(t.lg_zsd, "zsd", table.cap_zsd_deg);
    lsp.zsa = spread(t.lg_zsa, "zsa", table.cap_zsa_deg);
    lsp.sf_db = t.sf_std_db * value("sf");
    lsp.k_db = lsp.los ? t.k_mu_db + t.k_sigma_db * value("k") : 0.0;
    return lsp;
}

void realign_rays(Cluster& cluster) {
    for (auto& ray : cluster.rays) {
        ray.aoa = wrap_azimuth(cluster.aoa + ray.offsets[0]);
        ray.zoa = wrap_zenith(cluster.zoa + ray.offsets[1]);
        ray.aod = wrap_azimuth(cluster.aod + ray.offsets[2]);
        ray.zod = wrap_zenith(cluster.zod + ray.offsets[3]);
    }
}

ClusterSet generate_clusters(const ScenarioTable& table, const LargeScaleParams& lsp, const LinkGeometry& geometry,
                             double carrier_hz, RandomEngine& rng, std::string link_id) {
    if (!(carrier_hz > 0.0))
        throw InvalidCarrier("generate_clusters: carrier frequency must be positive");
    const ConditionTable& t = table.condition(lsp.los ? LinkCondition::los : LinkCondition::nlos);
    const std::size_t n_clusters = t.clusters;
    const std::size_t n_rays = table.rays_per_cluster;
    const double k_db = lsp.k_db;
    const double k_lin = lsp.los ? std::pow(10.0, k_db / 10.0) : 0.0;

    // Delays.
    std::vector<double> delays(n_clusters);
    for (auto& tau : delays)
        tau = -t.r_tau * lsp.ds * std::log(uniform01_open(rng));
    const double min_tau = *std::min_element(delays.begin(), delays.end());
    for (auto& tau : delays)
        tau -= min_tau;
    std::sort(delays.begin(), delays.end());

    // Powers.
    std::vector<double> powers(n_clusters);
    for (std::size_t n = 0; n < n_clusters; ++n) {
        const double shadow_db = t.cluster_shadowing_std_db * standard_normal(rng);
        powers[n] = std::exp(-delays[n] * (t.r_tau - 1.0) / (t.r_tau * lsp.ds)) * std::pow(10.0, -shadow_db / 10.0);
    }
    const double power_sum = std::accumulate(powers.begin(), powers.end(), 0.0);
    for (auto& p : powers)
        p /= power_sum;

    // Powers including the specular component; these drive the angle mapping.
    std::vector<double> effective = powers;
    if (lsp.los) {
        for (auto& p : effective)
            p /= (1.0 + k_lin);
        effective[0] += k_lin / (1.0 + k_lin);
        const double c_tau = 0.7705 - 0.0433 * k_db + 2e-4 * k_db * k_db + 17e-6 * k_db * k_db * k_db;
        for (auto& tau : delays)
            tau /= c_tau;
    }
    const double max_power = *std::max_element(effective.begin(), effective.end());

    double c_phi = lookup(table.c_phi_nlos, n_clusters, "azimuth");
    double c_theta = lookup(table.c_theta_nlos, n_clusters, "zenith");
    if (lsp.los) {
        c_phi *= 1.1035 - 0.028 * k_db - 2e-3 * k_db * k_db + 1e-4 * k_db * k_db * k_db;
        c_theta *= 1.3086 + 0.0339 * k_db - 0.0077 * k_db * k_db + 2e-4 * k_db * k_db * k_db;
    }

    std::vector<double> aoa(n_clusters), aod(n_clusters), zoa(n_clusters), zod(n_clusters);
    const double zod_offset = deg2rad(t.zod_offset_deg);
    for (std::size_t n = 0; n < n_clusters; ++n) {
        const double log_ratio = -std::log(effective[n] / max_power);
        const double az = 2.0 * std::sqrt(log_ratio) / (1.4 * c_phi);
        const double el = log_ratio / c_theta;
        const double sign = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.5 ? -1.0 : 1.0;
        aoa[n] = sign * lsp.asa * az + standard_normal(rng) * lsp.asa / 7.0 + geometry.arrival.azimuth;
        aod[n] = sign * lsp.asd * az + standard_normal(rng) * lsp.asd / 7.0 + geometry.departure.azimuth;
        zoa[n] = sign * lsp.zsa * el + standard_normal(rng) * lsp.zsa / 7.0 + geometry.arrival.zenith;
        zod[n] = sign * lsp.zsd * el + standard_normal(rng) * lsp.zsd / 7.0 + geometry.departure.zenith + zod_offset;
    }
    if (lsp.los) {
        // Pin the first cluster onto the geometric LoS direction.
        const double d_aoa = aoa[0] - geometry.arrival.azimuth;
        const double d_aod = aod[0] - geometry.departure.azimuth;
        const double d_zoa = zoa[0] - geometry.arrival.zenith;
        const double d_zod = zod[0] - geometry.departure.zenith;
        for (std::size_t n = 0; n < n_clusters; ++n) {
            aoa[n] -= d_aoa;
            aod[n] -= d_aod;
            zoa[n] -= d_zoa;
            zod[n] -= d_zod;
        }
        aoa[0] = geometry.arrival.azimuth;
        aod[0] = geometry.departure.azimuth;
        zoa[0] = geometry.arrival.zenith;
        zod[0] = geometry.departure.zenith;
    }

    const double c_asa = deg2rad(t.c_asa_deg);
    const double c_asd = deg2rad(t.c_asd_deg);
    const double c_zsa = deg2rad(t.c_zsa_deg);
    const double c_zsd = deg2rad(0.375 * std::pow(10.0, t.lg_zsd.mean(carrier_hz)));
    const double wavelength = kSpeedOfLight / carrier_hz;

    ClusterSet set;
    set.los = lsp.los;
    set.link_id = std::move(link_id);
    set.distance_m = geometry.distance_m;
    set.clusters.reserve(n_clusters);

    std::vector<std::size_t> order(n_rays);
    for (std::size_t n = 0; n < n_clusters; ++n) {
        Cluster cluster;
        cluster.index = n;
        cluster.power = effective[n];
        cluster.delay = delays[n];
        cluster.aoa = wrap_azimuth(aoa[n]);
        cluster.aod = wrap_azimuth(aod[n]);
        cluster.zoa = wrap_zenith(zoa[n]);
        cluster.zod = wrap_zenith(zod[n]);

        const double scattered_power = lsp.los ? powers[n] / (1.0 + k_lin) : powers[n];
        cluster.specular_power = lsp.los && n == 0 ? k_lin / (1.0 + k_lin) : 0.0;
        const double ray_amplitude = std::sqrt(scattered_power / static_cast<double>(n_rays));
        cluster.rays.resize(n_rays);
        const std::array<double, 4> scale{c_asa, c_zsa, c_asd, c_zsd};
        for (std::size_t dim = 0; dim < 4; ++dim) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::shuffle(order.begin(), order.end(), rng);
            for (std::size_t m = 0; m < n_rays; ++m)
                cluster.rays[m].offsets[dim] = scale[dim] * table.ray_offsets[order[m]];
        }
        for (auto& ray : cluster.rays) {
            ray.amplitude = ray_amplitude;
            ray.delay = cluster.delay;
            const double xpr_db = t.xpr_mu_db + t.xpr_sigma_db * standard_normal(rng);
            ray.xpr_linear = std::pow(10.0, xpr_db / 10.0);
            for (auto& phase : ray.phases)
                phase = uniform_phase(rng);
        }
        if (lsp.los && n == 0) {
            Ray specular;
            specular.specular = true;
            specular.amplitude = std::sqrt(k_lin / (1.0 + k_lin));
            specular.delay = cluster.delay;
            specular.xpr_linear = std::numeric_limits<double>::infinity();
            const double phase = wrap_azimuth(-2.0 * std::numbers::pi * geometry.distance_m / wavelength);
            specular.phases = {phase, 0.0, 0.0, wrap_azimuth(phase + std::numbers::pi)};
            cluster.rays.insert(cluster.rays.begin(), specular);
        }
        realign_rays(cluster);
        set.clusters.push_back(std::move(cluster));
    }
    return set;
}

ClusterSet prune_clusters(const ClusterSet& set, double threshold_db) {
    if (set.clusters.empty())
        throw ConfigError("prune_clusters: empty cluster set");
    const auto strongest = std::max_element(set.clusters.begin(), set.clusters.end(),
                                            [](const Cluster& a, const Cluster& b) { return a.power < b.power; });
    auto scattered = [](const Cluster& c) { return c.power - c.specular_power; };
    double max_scattered = 0.0;
    for (const auto& c : set.clusters)
        max_scattered = std::max(max_scattered, scattered(c));
    const double floor = max_scattered * std::pow(10.0, -threshold_db / 10.0);

    ClusterSet out;
    out.los = set.los;
    out.link_id = set.link_id;
    out.distance_m = set.distance_m;
    for (auto it = set.clusters.begin(); it != set.clusters.end(); ++it)
        if (it == strongest || !(scattered(*it) < floor))
            out.clusters.push_back(*it);

    const double total = out.total_power();
    if (!(total > 0.0))
        throw DegenerateChannel("prune_clusters: cluster set has no power");
    const double amplitude_scale = std::sqrt(1.0 / total);
    for (std::size_t n = 0; n < out.clusters.size(); ++n) {
        auto& c = out.clusters[n];
        c.index = n;
        c.power /= total;
        c.specular_power /= total;
        for (auto& ray : c.rays)
            ray.amplitude *= amplitude_scale;
    }
    return out;
}

double inh_pathloss_db(double distance_3d_m, double carrier_hz, LinkCondition condition) {
    if (!(carrier_hz > 0.0))
        throw InvalidCarrier("inh_pathloss_db: carrier frequency must be positive");
    const double d = std::max(distance_3d_m, 1.0);
    const double fc_ghz = carrier_hz / 1e9;
    const double los = 32.4 + 17.3 * std::log10(d) + 20.0 * std::log10(fc_ghz);
    if (condition == LinkCondition::los)
        return los;
    return std::max(los, 38.3 * std::log10(d) + 17.30 + 24.9 * std::log10(fc_ghz));
}

} // namespace isac
