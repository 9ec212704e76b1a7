// SPDX-License-Identifier: Apache-2.0
// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include "isac/export.hpp"
#include "isac/harness.hpp"
#include "isac/rng.hpp"
#include "isac/stats.hpp"
#include "oracles.hpp"

using namespace isac;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kDrops = 200;

struct Verdict {
    bool pass{true};
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass)
                detail = what;
            pass = false;
        }
    }
};

int failures = 0;

void report(int id, const char* name, const Verdict& v, const std::string& summary) {
    std::printf("%s %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name, v.pass ? summary.c_str() : v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
}

template <typename Fn>
void guarded(std::initializer_list<std::pair<int, const char*>> criteria, Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        Verdict v;
        v.require(false, std::string("exception: ") + e.what());
        for (auto [id, name] : criteria)
            report(id, name, v, "");
    }
}

unsigned threads() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

ScenarioConfig config_file(const char* name) { return load_config(std::string(ISAC_SOURCE_DIR "/configs/") + name); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("isac_acceptance_" + name);
    fs::remove_all(dir);
    return dir;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ','))
        out.push_back(cell);
    return out;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

void geometry_fidelity() {
    Verdict v;
    const auto config = config_file("reference_inh.json");
    const auto start = std::chrono::steady_clock::now();
    const auto results = run_drops(config);
    const auto dir = scratch("geometry");
    io::export_results(results, config, dir);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const auto& r = results.at(0);
    const double expected_delay = 10.0 / kSpeedOfLight;
    double worst_az = 0.0, worst_zen = 0.0, worst_delay = 0.0;
    auto az_error = [](double az_deg, double want) {
        const double d = std::fmod(az_deg - want + 720.0, 360.0);
        return std::min(d, 360.0 - d);
    };
    v.require(r.targets.size() == 12, "expected 12 targets");
    for (std::size_t l = 0; l < r.targets.size(); ++l) {
        v.require(r.targets[l].paths.size() == 1, "target with more than one LoS path");
        const auto& p = r.targets[l].paths.at(0);
        worst_az = std::max(worst_az, az_error(rad2deg(p.departure.azimuth), 30.0 * l));
        worst_zen = std::max(worst_zen, std::abs(rad2deg(p.departure.zenith) - 90.0));
        worst_delay = std::max(worst_delay, std::abs(p.delay - expected_delay));
    }
    v.require(worst_az <= 1e-9, fmt("AAoD error %.3g deg", worst_az));
    v.require(worst_zen <= 1e-9, fmt("ZAoD error %.3g deg", worst_zen));
    v.require(worst_delay <= 1e-15, fmt("delay error %.3g s", worst_delay));

    std::istringstream csv(slurp(dir / "drop_0/paths.csv"));
    std::string line;
    std::getline(csv, line);
    const auto header = split(line);
    auto column = [&](const std::string& name) {
        return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
    };
    const std::size_t c_aod = column("aod_deg"), c_zod = column("zod_deg"), c_delay = column("delay_s");
    std::vector<double> csv_az;
    while (std::getline(csv, line)) {
        const auto cells = split(line);
        if (cells.at(0) != "sensing")
            continue;
        csv_az.push_back(std::stod(cells.at(c_aod)));
        v.require(std::abs(std::stod(cells.at(c_zod)) - 90.0) <= 1e-9, "CSV ZAoD differs from 90 deg");
        v.require(std::abs(std::stod(cells.at(c_delay)) - expected_delay) <= 1e-15, "CSV delay differs from 10/c");
    }
    v.require(csv_az.size() == 12, "CSV does not hold 12 sensing paths");
    for (std::size_t l = 0; l < csv_az.size(); ++l)
        v.require(az_error(csv_az[l], 30.0 * l) <= 1e-9, "CSV AAoD set differs from {0, 30, ..., 330}");
    v.require(seconds < 1.0, fmt("runtime %.3f s", seconds));

    report(1, "geometry fidelity", v,
           fmt("12 paths, max AAoD err %.2g deg, max delay err %.2g s, drop + export %.3f s", worst_az, worst_delay,
               seconds));
}

void shared_angle_equality() {
    Verdict v;
    std::size_t checked = 0;
    for (const char* name : {"reference_inh.json", "bistatic_case3.json"}) {
        auto config = config_file(name);
        config.n_drops = kDrops;
        const auto results = run_drops(config, threads());
        for (const auto& r : results)
            for (const auto& p : r.sharing.pairs) {
                const auto& c = r.comm_clusters.clusters.at(p.cluster_index);
                const auto& los = r.targets.at(p.target_index).los;
                const bool departure = config.integration_case != IntegrationCase::rx_integrated;
                const bool arrival = config.integration_case != IntegrationCase::tx_integrated_monostatic;
                if (departure)
                    v.require(c.aod == los.departure.azimuth && c.zod == los.departure.zenith,
                              std::string(name) + ": departure centroid differs, drop " + std::to_string(r.drop_id));
                if (arrival)
                    v.require(c.aoa == los.arrival.azimuth && c.zoa == los.arrival.zenith,
                              std::string(name) + ": arrival centroid differs, drop " + std::to_string(r.drop_id));
                ++checked;
            }
    }
    v.require(checked > 0, "no shared pairs");
    report(2, "shared-angle equality", v,
           std::to_string(checked) + " pairs bit-exact over " + std::to_string(kDrops) + " drops x 2 layouts");
}

void decomposition_identities() {
    Verdict v;
    double worst = 0.0;
    std::size_t entries = 0;
    for (const char* name : {"reference_inh.json", "bistatic_case3.json"}) {
        auto config = config_file(name);
        config.n_drops = kDrops;
        for (const auto& r : run_drops(config, threads())) {
            worst = std::max(worst, max_relative_error(r.comm.total, r.comm.shared + r.comm.non_shared));
            worst = std::max(worst, max_relative_error(r.sensing_total, r.sensing_shared + r.sensing_non_shared));
            entries += r.comm.total.size() + r.sensing_total.size();
        }
    }
    v.require(worst <= 1e-12, fmt("max relative error %.3g", worst));
    report(3, "decomposition identities", v,
           fmt("max relative error %.3g over %.0f entries", worst, static_cast<double>(entries)));
}

void sd_campaign() {
    auto config = config_file("sd_sweep.json");
    config.n_drops = kDrops;
    const std::vector<std::size_t> counts{4, 6, 8, 10};
    const auto campaign = run_campaign(config, counts, threads());

    Verdict mono;
    std::string summary;
    double worst_p = 0.0;
    for (std::size_t k = 0; k + 1 < counts.size(); ++k) {
        const auto& a = campaign.points[k];
        const auto& b = campaign.points[k + 1];
        const std::string step = std::to_string(counts[k]) + "->" + std::to_string(counts[k + 1]);
        mono.require(b.mean_sd_c > a.mean_sd_c, "mean SD_c not increasing at " + step);
        mono.require(b.mean_sd_s > a.mean_sd_s, "mean SD_s not increasing at " + step);
        const double pc = oracle::wilcoxon_greater_p(a.sd_c, b.sd_c);
        const double ps = oracle::wilcoxon_greater_p(a.sd_s, b.sd_s);
        mono.require(pc < 0.01, "Wilcoxon p(SD_c) = " + fmt("%.3g", pc) + " at " + step);
        mono.require(ps < 0.01, "Wilcoxon p(SD_s) = " + fmt("%.3g", ps) + " at " + step);
        worst_p = std::max({worst_p, pc, ps});
    }
    for (const auto& p : campaign.points)
        summary += fmt("n=%.0f: %.3f/%.3f; ", static_cast<double>(p.shared_count), p.mean_sd_c, p.mean_sd_s);
    report(4, "SD monotonicity", mono, "mean SD_c/SD_s " + summary + fmt("max Wilcoxon p %.2g", worst_p));

    Verdict conc;
    std::string stds;
    for (const auto& p : campaign.points) {
        const std::string n = std::to_string(p.shared_count);
        stds += fmt("n=%.0f: %.4f<%.4f; ", static_cast<double>(p.shared_count), p.std_sd_s, p.std_sd_c);
        conc.require(p.std_sd_s < p.std_sd_c,
                     "n=" + n + ": std SD_s " + fmt("%.4f", p.std_sd_s) + " >= std SD_c " + fmt("%.4f", p.std_sd_c));
    }
    if (!conc.pass)
        conc.detail += " (all: " + stds.substr(0, stds.size() - 2) + ")";
    report(5, "sensing SD concentration", conc, "std SD_s < std SD_c " + stds.substr(0, stds.size() - 2));
}

void baseline_compatibility() {
    Verdict v;
    for (const char* name : {"reference_inh.json", "bistatic_case3.json"}) {
        auto config = config_file(name);
        config.shared_ratio = 0.0;
        config.shared_count.reset();
        config.n_drops = kDrops;
        for (const auto& r : run_drops(config, threads())) {
            v.require(r.comm.total == baseline_comm_cir(config, r.drop_id),
                      std::string(name) + ": CIR differs from baseline, drop " + std::to_string(r.drop_id));
            v.require(r.sd_c == 0.0 && r.sd_s == 0.0, std::string(name) + ": nonzero SD");
        }
    }
    report(6, "baseline compatibility", v,
           "ratio 0 bit-identical to the stochastic pipeline, SD_c = SD_s = 0, " + std::to_string(kDrops) +
               " drops x 2 layouts");
}

ClusterSet clusters_at(const std::vector<SphericalAngles>& dirs) {
    ClusterSet set;
    for (std::size_t n = 0; n < dirs.size(); ++n) {
        Cluster c;
        c.index = n;
        c.power = 1.0 / dirs.size();
        c.aod = dirs[n].azimuth;
        c.zod = dirs[n].zenith;
        c.aoa = dirs[n].azimuth;
        c.zoa = dirs[n].zenith;
        set.clusters.push_back(c);
    }
    return set;
}

void oracle_equivalence() {
    Verdict v;
    RandomEngine rng(20240601);
    std::uniform_real_distribution<double> az(-M_PI, M_PI), zen(0.0, M_PI);
    std::uniform_int_distribution<int> size(1, 5);
    for (int instance = 0; instance < 1000; ++instance) {
        const std::size_t L = size(rng), N = size(rng);
        std::vector<SphericalAngles> targets(L), dirs(N);
        for (auto& t : targets)
            t = {zen(rng), az(rng)};
        for (auto& d : dirs)
            d = {zen(rng), az(rng)};
        const auto comm = clusters_at(dirs);
        std::vector<std::vector<double>> score(L, std::vector<double>(N));
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t n = 0; n < N; ++n)
                score[l][n] =
                    oracle::pairing_score(targets[l].azimuth, targets[l].zenith, dirs[n].azimuth, dirs[n].zenith);
        const std::size_t count = std::uniform_int_distribution<std::size_t>(0, std::min(L, N))(rng);
        const auto expected = oracle::sequential_argmin(score, count);
        const auto [pairs, s] = select_shared_pairs(targets, comm, count);
        bool same = pairs.size() == expected.size();
        for (std::size_t k = 0; same && k < pairs.size(); ++k)
            same = pairs[k].target_index == expected[k].first && pairs[k].cluster_index == expected[k].second;
        v.require(same, "greedy selection differs from brute force, instance " + std::to_string(instance));
    }

    // Cascade path counts on full stochastic legs.
    const Node bs{Point3(0, 0, 1.5), Velocity3::Zero(), ArrayGeometry{}};
    const Node rx{Point3(6, 2, 1.5), Velocity3::Zero(), ArrayGeometry{}};
    std::size_t cascades = 0;
    for (auto cond : {LinkCondition::los, LinkCondition::nlos})
        for (const Node* sensing_rx : {&bs, &rx})
            for (int k = 0; k < 5; ++k) {
                Target t;
                t.position = Point3(3.0 + k, -2.0 + k, 1.2);
                const SubChannelPolicy policy{SensingClusterMode::full, cond, 28e9, 25.0, nullptr};
                const auto legs = build_target_sub_channels(bs, t, *sensing_rx, policy, rng);
                const auto paths = cascade(legs.tx_leg, legs.rx_leg, {}, rng);
                v.require(paths.size() == legs.tx_leg.ray_count() * legs.rx_leg.ray_count(),
                          "cascade path count differs from the leg ray product");
                ++cascades;
            }

    // decompose against the direct per-target sum.
    double worst = 0.0;
    for (const char* name : {"reference_inh.json", "bistatic_case3.json"}) {
        auto config = config_file(name);
        config.n_drops = 20;
        const Node tx = config.sensing_tx_node(), srx = config.sensing_rx_node();
        for (const auto& r : run_drops(config, threads())) {
            std::vector<TargetCascade> scene;
            for (const auto& t : r.targets)
                scene.push_back({t.id, t.rcs, t.paths});
            std::vector<CirTensor> per_target;
            CirTensor direct_shared = r.sensing_total.zeros_like(), direct_other = r.sensing_total.zeros_like();
            for (std::size_t l = 0; l < scene.size(); ++l) {
                per_target.push_back(
                    assemble_sensing_cir(scene, tx.array, srx.array, config.wavelength(), config.time_samples, l));
                (r.sharing.vector.is_shared(l) ? direct_shared : direct_other) += per_target.back();
            }
            const auto d = decompose(per_target, r.sharing.vector);
            worst = std::max({worst, max_relative_error(d.shared, direct_shared),
                              max_relative_error(d.non_shared, direct_other),
                              max_relative_error(r.sensing_shared, direct_shared),
                              max_relative_error(r.sensing_non_shared, direct_other)});
        }
    }
    v.require(worst <= 1e-12, fmt("decompose differs from the per-target sum by %.3g", worst));
    report(7, "oracle equivalence", v,
           "1000 greedy instances match brute force, " + std::to_string(cascades) +
               " cascades with product path counts, decompose error " + fmt("%.2g", worst));
}

void generator_statistics() {
    Verdict v;
    const auto& table = ScenarioTable::inh_office();
    constexpr double fc = 28e9;
    constexpr int draws = 10000;
    const LinkGeometry link = LinkGeometry::between(Point3(0, 0, 1.5), Point3(10, 0, 1.5));

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        RandomEngine rng(seed);
        for (auto cond : {LinkCondition::los, LinkCondition::nlos}) {
            const auto lsp = draw_large_scale(table, cond, fc, rng);
            const auto set = generate_clusters(table, lsp, link, fc, rng);
            v.require(set.clusters.size() == table.condition(cond).clusters, "wrong cluster count");
        }
    }

    std::vector<double> phases;
    for (std::uint64_t seed = 0; phases.size() < 100000; ++seed) {
        RandomEngine rng(seed);
        const auto lsp = draw_large_scale(table, LinkCondition::nlos, fc, rng);
        for (const auto& c : generate_clusters(table, lsp, link, fc, rng).clusters)
            for (const auto& r : c.rays)
                for (double ph : r.phases)
                    phases.push_back(ph);
    }
    phases.resize(100000);
    const double ks = oracle::ks_uniform(phases, -M_PI, M_PI);
    const double ks_crit = oracle::ks_critical_1pct(phases.size());
    v.require(ks < ks_crit, fmt("phase KS statistic %.4g >= %.4g", ks, ks_crit));

    double worst_log = 0.0, worst_db_z = 0.0;
    for (auto cond : {LinkCondition::los, LinkCondition::nlos}) {
        const auto& t = table.condition(cond);
        RandomEngine rng(cond == LinkCondition::los ? 101 : 202);
        std::vector<std::vector<double>> x(7);
        for (int i = 0; i < draws; ++i) {
            const auto lsp = draw_large_scale(table, cond, fc, rng);
            x[0].push_back(std::log10(lsp.ds));
            x[1].push_back(std::log10(rad2deg(lsp.asd)));
            x[2].push_back(std::log10(rad2deg(lsp.asa)));
            x[3].push_back(std::log10(rad2deg(lsp.zsa)));
            x[4].push_back(std::log10(rad2deg(lsp.zsd)));
            x[5].push_back(lsp.sf_db);
            x[6].push_back(lsp.k_db);
        }
        const FrequencyDependentLogNormal* spread[5] = {&t.lg_ds, &t.lg_asd, &t.lg_asa, &t.lg_zsa, &t.lg_zsd};
        const double caps[5] = {1e300, table.cap_asd_deg, table.cap_asa_deg, table.cap_zsa_deg, table.cap_zsd_deg};
        for (int k = 0; k < 5; ++k) {
            const double mu = spread[k]->mean(fc), sigma = spread[k]->stddev(fc);
            const double a = (std::log10(caps[k]) - mu) / sigma;
            const double m1 = oracle::capped_normal_mean(a);
            const double m2 = oracle::capped_normal_second_moment(a);
            const double want_mean = mu + sigma * m1;
            const double want_std = sigma * std::sqrt(m2 - m1 * m1);
            worst_log = std::max({worst_log, std::abs(stats::mean(x[k]) - want_mean),
                                  std::abs(stats::stddev(x[k]) - want_std)});
        }
        const double se = 1.0 / std::sqrt(static_cast<double>(draws));
        worst_db_z = std::max(worst_db_z, std::abs(stats::mean(x[5])) / (t.sf_std_db * se));
        if (cond == LinkCondition::los)
            worst_db_z = std::max(worst_db_z, std::abs(stats::mean(x[6]) - t.k_mu_db) / (t.k_sigma_db * se));
    }
    v.require(worst_log <= 0.02, fmt("log10 moment error %.4f > 0.02", worst_log));
    v.require(worst_db_z <= 4.0, fmt("SF/K mean off by %.2f standard errors", worst_db_z));
    report(8, "generator statistics", v,
           fmt("cluster counts 15/19, phase KS %.4f < %.4f, max log10 moment error %.4f", ks, ks_crit, worst_log) +
               fmt(", SF/K mean within %.2f SE", worst_db_z));
}

void determinism() {
    Verdict v;
    std::size_t files = 0;
    for (const char* name : {"reference_inh.json", "bistatic_case3.json"}) {
        auto config = config_file(name);
        config.n_drops = 6;
        std::vector<fs::path> dirs;
        std::vector<io::Manifest> manifests;
        for (unsigned t : {1u, 1u, 4u}) {
            dirs.push_back(scratch(std::string(name) + "_" + std::to_string(dirs.size())));
            manifests.push_back(io::export_results(run_drops(config, t), config, dirs.back()));
        }
        auto sweep = config;
        sweep.n_drops = 12;
        for (unsigned t : {1u, 3u}) {
            dirs.push_back(scratch(std::string(name) + "_campaign_" + std::to_string(t)));
            manifests.push_back(io::export_campaign(run_campaign(sweep, {1, 2}, t), sweep, dirs.back()));
        }
        auto same = [&](std::size_t a, std::size_t b) {
            v.require(manifests[a].files == manifests[b].files, std::string(name) + ": file lists differ");
            for (const auto& f : manifests[a].files) {
                v.require(slurp(dirs[a] / f) == slurp(dirs[b] / f), std::string(name) + ": " + f + " differs");
                ++files;
            }
        };
        same(0, 1);
        same(0, 2);
        same(3, 4);
    }
    report(9, "determinism", v, std::to_string(files) + " file comparisons byte-identical across runs and threads");
}

} // namespace

int main() {
    guarded({{1, "geometry fidelity"}}, geometry_fidelity);
    guarded({{2, "shared-angle equality"}}, shared_angle_equality);
    guarded({{3, "decomposition identities"}}, decomposition_identities);
    guarded({{4, "SD monotonicity"}, {5, "sensing SD concentration"}}, sd_campaign);
    guarded({{6, "baseline compatibility"}}, baseline_compatibility);
    guarded({{7, "oracle equivalence"}}, oracle_equivalence);
    guarded({{8, "generator statistics"}}, generator_statistics);
    guarded({{9, "determinism"}}, determinism);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
