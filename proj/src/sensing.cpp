// SPDX-License-Identifier: Apache-2.0
#include "isac/sensing.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "isac/polarization.hpp"

namespace isac {

RcsMatrix evaluate_rcs(const RcsSpec& spec, const SphericalAngles& /*outgoing*/, const SphericalAngles& /*incident*/,
                       RandomEngine& rng) {
    switch (spec.mode) {
    case RcsMode::fixed:
        return spec.matrix;
    case RcsMode::stochastic_uniform: {
        if (spec.min_m2 < 0.0 || spec.max_m2 < spec.min_m2)
            throw ConfigError("evaluate_rcs: invalid RCS range");
        const double rcs_m2 = spec.min_m2 == spec.max_m2
                                  ? spec.min_m2
                                  : std::uniform_real_distribution<double>(spec.min_m2, spec.max_m2)(rng);
        return std::sqrt(rcs_m2) * spec.matrix;
    }
    }
    throw ConfigError("evaluate_rcs: unknown RCS mode");
}

namespace {

ClusterSet los_leg(const Point3& from, const Point3& to, std::string link_id) {
    const double distance = distance_3d(from, to);
    if (!(distance > 0.0))
        throw DegenerateGeometry("sensing leg " + link_id + " has zero length");
    const LinkGeometry g = LinkGeometry::between(from, to);

    Ray ray;
    ray.specular = true;
    ray.amplitude = 1.0;
    ray.delay = distance / kSpeedOfLight;
    ray.xpr_linear = std::numeric_limits<double>::infinity();

    Cluster cluster;
    cluster.index = 0;
    cluster.power = 1.0;
    cluster.delay = ray.delay;
    cluster.aod = g.departure.azimuth;
    cluster.zod = g.departure.zenith;
    cluster.aoa = g.arrival.azimuth;
    cluster.zoa = g.arrival.zenith;
    cluster.rays.push_back(ray);
    realign_rays(cluster);

    ClusterSet set;
    set.los = true;
    set.link_id = std::move(link_id);
    set.distance_m = distance;
    set.clusters.push_back(std::move(cluster));
    return set;
}

ClusterSet stochastic_leg(const Point3& from, const Point3& to, const SubChannelPolicy& policy, RandomEngine& rng,
                          std::string link_id) {
    const double distance = distance_3d(from, to);
    if (!(distance > 0.0))
        throw DegenerateGeometry("sensing leg " + link_id + " has zero length");
    const ScenarioTable& table = policy.table ? *policy.table : ScenarioTable::inh_office();
    const LinkGeometry g = LinkGeometry::between(from, to);
    const LargeScaleParams lsp = draw_large_scale(table, policy.leg_condition, policy.carrier_hz, rng);
    ClusterSet set =
        prune_clusters(generate_clusters(table, lsp, g, policy.carrier_hz, rng, std::move(link_id)),
                       policy.prune_threshold_db);
    const double los_delay = distance / kSpeedOfLight;
    for (auto& cluster : set.clusters) {
        cluster.delay += los_delay;
        for (auto& ray : cluster.rays)
            ray.delay += los_delay;
    }
    return set;
}

} // namespace

SubChannels build_target_sub_channels(const Node& tx, const Target& target, const Node& rx,
                                      const SubChannelPolicy& policy, RandomEngine& rng) {
    const std::string tag = "target" + std::to_string(target.id);
    if (policy.mode == SensingClusterMode::los_only)
        return {los_leg(tx.position, target.position, tag + "/tx_leg"),
                los_leg(target.position, rx.position, tag + "/rx_leg")};
    SubChannels legs;
    legs.tx_leg = stochastic_leg(tx.position, target.position, policy, rng, tag + "/tx_leg");
    legs.rx_leg = stochastic_leg(target.position, rx.position, policy, rng, tag + "/rx_leg");
    return legs;
}

double cascade_pathloss_amplitude(const CascadeSettings& settings, double tx_leg_distance, double rx_leg_distance) {
    if (!(settings.carrier_hz > 0.0))
        throw InvalidCarrier("cascade: carrier frequency must be positive");
    if (!(tx_leg_distance > 0.0) || !(rx_leg_distance > 0.0))
        throw DegenerateGeometry("cascade: zero-length leg");
    switch (settings.pathloss) {
    case PathlossMode::two_stage_38901: {
        const double loss_db = inh_pathloss_db(tx_leg_distance, settings.carrier_hz, settings.leg_condition) +
                               inh_pathloss_db(rx_leg_distance, settings.carrier_hz, settings.leg_condition);
        return std::pow(10.0, -loss_db / 20.0);
    }
    case PathlossMode::radar_equation: {
        // |sigma| enters through the RCS matrix at assembly.
        const double wavelength = kSpeedOfLight / settings.carrier_hz;
        return wavelength / (std::pow(4.0 * std::numbers::pi, 1.5) * tx_leg_distance * rx_leg_distance);
    }
    }
    throw ConfigError("cascade: unknown path-loss mode");
}

std::vector<CascadePath> cascade(const ClusterSet& tx_leg, const ClusterSet& rx_leg, const CascadeSettings& settings,
                                 RandomEngine& rng) {
    if (tx_leg.clusters.empty() || rx_leg.clusters.empty())
        throw ConfigError("cascade: empty sub-channel");
    const double scale = cascade_pathloss_amplitude(settings, tx_leg.distance_m, rx_leg.distance_m);
    const double wavelength = kSpeedOfLight / settings.carrier_hz;

    std::vector<CascadePath> paths;
    paths.reserve(tx_leg.ray_count() * rx_leg.ray_count());
    for (const auto& tc : tx_leg.clusters) {
        for (std::size_t tr = 0; tr < tc.rays.size(); ++tr) {
            const Ray& in = tc.rays[tr];
            const SphericalAngles incident = in.arrival();
            const double f_in = (settings.target_velocity.dot(spherical_unit_vector(incident)) +
                                 settings.tx_velocity.dot(spherical_unit_vector(in.departure()))) /
                                wavelength;
            for (const auto& rc : rx_leg.clusters) {
                for (std::size_t rr = 0; rr < rc.rays.size(); ++rr) {
                    const Ray& out = rc.rays[rr];
                    CascadePath p;
                    p.tx_cluster = tc.index;
                    p.tx_ray = tr;
                    p.rx_cluster = rc.index;
                    p.rx_ray = rr;
                    p.amplitude = in.amplitude * out.amplitude * scale;
                    p.tx_leg_delay = in.delay;
                    p.rx_leg_delay = out.delay;
                    p.delay = in.delay + out.delay;
                    p.departure = in.departure();
                    p.incident = incident;
                    p.outgoing = out.departure();
                    p.arrival = out.arrival();
                    p.xpr_linear = 1.0 / (1.0 / in.xpr_linear + 1.0 / out.xpr_linear);
                    for (auto& phase : p.phases)
                        phase = uniform_phase(rng);
                    const double f_out = (settings.target_velocity.dot(spherical_unit_vector(p.outgoing)) +
                                          settings.rx_velocity.dot(spherical_unit_vector(p.arrival))) /
                                         wavelength;
                    p.doppler_hz = f_in + f_out;
                    paths.push_back(p);
                }
            }
        }
    }
    return paths;
}

CirTensor assemble_sensing_cir(std::span<const TargetCascade> targets, const ArrayGeometry& tx_array,
                               const ArrayGeometry& rx_array, double wavelength, std::span<const double> time_samples,
                               std::optional<std::size_t> only_target) {
    if (only_target && *only_target >= targets.size())
        throw ConfigError("assemble_sensing_cir: target selection out of range");
    std::vector<bool> include(targets.size(), !only_target);
    if (only_target)
        include[*only_target] = true;
    return assemble_sensing_cir(targets, tx_array, rx_array, wavelength, time_samples, include);
}

CirTensor assemble_sensing_cir(std::span<const TargetCascade> targets, const ArrayGeometry& tx_array,
                               const ArrayGeometry& rx_array, double wavelength, std::span<const double> time_samples,
                               const std::vector<bool>& include) {
    if (!(wavelength > 0.0))
        throw InvalidCarrier("assemble_sensing_cir: wavelength must be positive");
    if (tx_array.count() == 0 || rx_array.count() == 0)
        throw ConfigError("assemble_sensing_cir: empty antenna array");
    if (include.size() != targets.size())
        throw ConfigError("assemble_sensing_cir: one selection flag per target is required");

    std::size_t n_paths = 0;
    for (const auto& t : targets)
        n_paths += t.paths.size();

    CirTensor cir(rx_array.count(), tx_array.count(), n_paths, time_samples.size());
    cir.kind = LinkKind::sensing;
    std::size_t path_index = 0;
    for (std::size_t l = 0; l < targets.size(); ++l) {
        const TargetCascade& target = targets[l];
        const bool filled = include[l];
        for (const CascadePath& p : target.paths) {
            cir.path_delays()[path_index] = p.delay;
            if (filled) {
                const PolarizationMatrix middle = polarization_matrix(p.phases, p.xpr_linear) * target.rcs;
                for (std::size_t w = 0; w < rx_array.count(); ++w) {
                    const FieldVector f_rx = field_response(rx_array.pattern, p.arrival);
                    const auto rx_phase = array_phase(rx_array.element_positions[w], p.arrival, wavelength);
                    for (std::size_t e = 0; e < tx_array.count(); ++e) {
                        const FieldVector f_tx = field_response(tx_array.pattern, p.departure);
                        const auto tx_phase = array_phase(tx_array.element_positions[e], p.departure, wavelength);
                        const std::complex<double> base =
                            p.amplitude * polarimetric_gain(f_rx, middle, f_tx) * rx_phase * tx_phase;
                        for (std::size_t s = 0; s < time_samples.size(); ++s)
                            cir(w, e, path_index, s) =
                                base * std::polar(1.0, 2.0 * std::numbers::pi * p.doppler_hz * time_samples[s]);
                    }
                }
            }
            ++path_index;
        }
    }
    return cir;
}

} // namespace isac
