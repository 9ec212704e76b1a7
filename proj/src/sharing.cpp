// SPDX-License-Identifier: Apache-2.0
#include "isac/sharing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace isac {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double to_positive_azimuth(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0)
        w += kTwoPi;
    return w;
}

SphericalAngles cluster_direction(const Cluster& c, PairingSide side) {
    return side == PairingSide::departure ? SphericalAngles{c.zod, c.aod} : SphericalAngles{c.zoa, c.aoa};
}

} // namespace

std::size_t SharingVector::shared_count() const {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](int v) { return v != 0; }));
}

AngularGap angular_gap(const SphericalAngles& sensing, const SphericalAngles& comm, bool circular_azimuth) {
    AngularGap gap;
    gap.aod = std::abs(to_positive_azimuth(sensing.azimuth) - to_positive_azimuth(comm.azimuth));
    if (circular_azimuth)
        gap.aod = std::min(gap.aod, kTwoPi - gap.aod);
    gap.zod = std::abs(sensing.zenith - comm.zenith);
    gap.score = 0.5 * (gap.aod / kTwoPi + gap.zod / std::numbers::pi);
    return gap;
}

PairingSide pairing_side(IntegrationCase integration) {
    return integration == IntegrationCase::rx_integrated ? PairingSide::arrival : PairingSide::departure;
}

std::size_t shared_count_from_ratio(double ratio, std::size_t target_count, std::size_t limit) {
    if (!(ratio >= 0.0 && ratio <= 1.0))
        throw ConfigError("shared ratio must lie in [0, 1]");
    const double scaled = ratio * static_cast<double>(target_count);
    // Absorb representation error such as (1/6) * 12 = 1.9999999999999998.
    const auto rounded = static_cast<std::size_t>(std::floor(scaled + 0.5 + 1e-9));
    return std::min({rounded, target_count, limit});
}

std::pair<std::vector<SharedPair>, SharingVector>
select_shared_pairs(std::span<const SphericalAngles> target_angles, const ClusterSet& comm_clusters,
                    std::size_t n_shared, PairingSide side, bool circular_azimuth) {
    const std::size_t n_targets = target_angles.size();
    const std::size_t n_clusters = comm_clusters.clusters.size();
    if (n_shared > std::min(n_targets, n_clusters))
        throw ConfigError("select_shared_pairs: " + std::to_string(n_shared) + " shared pairs requested but only " +
                          std::to_string(n_targets) + " targets and " + std::to_string(n_clusters) +
                          " clusters are available");

    std::vector<double> score(n_targets * n_clusters);
    for (std::size_t l = 0; l < n_targets; ++l)
        for (std::size_t n = 0; n < n_clusters; ++n)
            score[l * n_clusters + n] =
                angular_gap(target_angles[l], cluster_direction(comm_clusters.clusters[n], side), circular_azimuth)
                    .score;

    std::vector<bool> target_used(n_targets, false);
    std::vector<bool> cluster_used(n_clusters, false);
    std::vector<SharedPair> pairs;
    pairs.reserve(n_shared);
    for (std::size_t k = 0; k < n_shared; ++k) {
        SharedPair best{0, 0, std::numeric_limits<double>::infinity()};
        for (std::size_t l = 0; l < n_targets; ++l) {
            if (target_used[l])
                continue;
            for (std::size_t n = 0; n < n_clusters; ++n) {
                if (cluster_used[n])
                    continue;
                // Strict comparison in (l, n) scan order keeps the lowest indices on ties.
                if (score[l * n_clusters + n] < best.score)
                    best = {l, n, score[l * n_clusters + n]};
            }
        }
        target_used[best.target_index] = true;
        cluster_used[best.cluster_index] = true;
        pairs.push_back(best);
    }

    SharingVector vector;
    vector.s.assign(n_targets, 0);
    for (const auto& p : pairs)
        vector.s[p.target_index] = 1;
    return {std::move(pairs), std::move(vector)};
}

ClusterSet apply_feedback(std::span<const SharedPair> pairs, const ClusterSet& comm_clusters,
                          std::span<const SensingLos> sensing, IntegrationCase integration, double comm_los_delay) {
    ClusterSet out = comm_clusters;
    for (const SharedPair& pair : pairs) {
        if (pair.cluster_index >= out.clusters.size())
            throw ConfigError("apply_feedback: cluster index " + std::to_string(pair.cluster_index) + " out of range");
        if (pair.target_index >= sensing.size())
            throw ConfigError("apply_feedback: target index " + std::to_string(pair.target_index) + " out of range");
        Cluster& cluster = out.clusters[pair.cluster_index];
        const SensingLos& los = sensing[pair.target_index];
        const bool departure = integration != IntegrationCase::rx_integrated;
        const bool arrival = integration != IntegrationCase::tx_integrated_monostatic;
        if (departure) {
            cluster.aod = los.departure.azimuth;
            cluster.zod = los.departure.zenith;
        }
        if (arrival) {
            cluster.aoa = los.arrival.azimuth;
            cluster.zoa = los.arrival.zenith;
        }
        if (integration == IntegrationCase::txrx_integrated_bistatic) {
            cluster.delay = std::max(0.0, los.delay - comm_los_delay);
            for (auto& ray : cluster.rays)
                ray.delay = cluster.delay;
        }
        realign_rays(cluster);
    }
    return out;
}

Decomposition decompose(std::span<const CirTensor> target_cirs, const SharingVector& vector) {
    if (target_cirs.size() != vector.size())
        throw ConfigError("decompose: sharing vector length " + std::to_string(vector.size()) +
                          " does not match target count " + std::to_string(target_cirs.size()));
    if (target_cirs.empty())
        throw ConfigError("decompose: no targets");
    Decomposition out{target_cirs.front().zeros_like(), target_cirs.front().zeros_like()};
    out.shared.component = Component::shared;
    out.non_shared.component = Component::non_shared;
    for (std::size_t l = 0; l < target_cirs.size(); ++l)
        (vector.is_shared(l) ? out.shared : out.non_shared) += target_cirs[l];
    return out;
}

double sharing_degree(double shared_power, double total_power) {
    if (!(total_power > 0.0))
        throw DegenerateChannel("sharing_degree: total power must be positive");
    return std::clamp(shared_power / total_power, 0.0, 1.0);
}

std::vector<bool> shared_cluster_flags(std::span<const SharedPair> pairs, std::size_t cluster_count) {
    std::vector<bool> flags(cluster_count, false);
    for (const auto& p : pairs) {
        if (p.cluster_index >= cluster_count)
            throw ConfigError("shared_cluster_flags: cluster index out of range");
        flags[p.cluster_index] = true;
    }
    return flags;
}

} // namespace isac
