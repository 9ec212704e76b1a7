// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "isac/cir_tensor.hpp"
#include "isac/geometry.hpp"
#include "isac/stochastic.hpp"

namespace isac {

/// Binary selector over the L sensing targets; s[l] = 1 marks target l as a shared scatterer.
struct SharingVector {
    std::vector<int> s;

    std::size_t size() const { return s.size(); }
    std::size_t shared_count() const;
    bool is_shared(std::size_t l) const { return s.at(l) != 0; }

    bool operator==(const SharingVector&) const = default;
};

struct SharedPair {
    std::size_t target_index{0};  // 0-based position in the target list
    std::size_t cluster_index{0}; // 0-based communication cluster index
    double score{0.0};

    bool operator==(const SharedPair&) const = default;
};

struct SharingState {
    SharingVector vector;
    std::vector<SharedPair> pairs;
    double target_ratio{0.0};
    /// Shared count asked for before clamping to the available clusters.
    std::size_t requested_count{0};
};

struct AngularGap {
    double aod{0.0};
    double zod{0.0};
    double score{0.0};
};

/// Gaps between a sensing LoS direction and a communication cluster centroid.
///
/// Azimuths are compared as raw values in [0, 2 pi) unless `circular_azimuth`
/// is set, in which case the shorter way around the circle is used. The score
/// averages the two gaps normalized by their ranges and lies in [0, 1].
AngularGap angular_gap(const SphericalAngles& sensing, const SphericalAngles& comm, bool circular_azimuth = false);

enum class IntegrationCase { tx_integrated_monostatic, rx_integrated, txrx_integrated_bistatic };

/// Which end of the communication link the sensing geometry is matched against.
enum class PairingSide { departure, arrival };

PairingSide pairing_side(IntegrationCase integration);

/// LoS geometry of one sensing target cascade.
struct SensingLos {
    SphericalAngles departure; // at the sensing TX toward the target
    SphericalAngles arrival;   // at the sensing RX toward the target
    double delay{0.0};         // TX -> target -> RX
};

/// Shared count for a target ratio: round half up of ratio * L, clamped to [0, limit].
std::size_t shared_count_from_ratio(double ratio, std::size_t target_count, std::size_t limit);

/// Sequential minimum-score pairing without repetition.
///
/// Each step takes the remaining (target, cluster) pair with the lowest score;
/// ties go to the lower target index, then the lower cluster index.
std::pair<std::vector<SharedPair>, SharingVector>
select_shared_pairs(std::span<const SphericalAngles> target_angles, const ClusterSet& comm_clusters,
                    std::size_t n_shared, PairingSide side = PairingSide::departure, bool circular_azimuth = false);

/// Copies the sensing LoS parameters onto the paired communication clusters.
///
/// Case 1 replaces departure centroids, case 2 arrival centroids, case 3 both
/// plus the delay (expressed as excess over `comm_los_delay`). Ray angles are
/// rebuilt from their stored offsets; nothing else changes.
ClusterSet apply_feedback(std::span<const SharedPair> pairs, const ClusterSet& comm_clusters,
                          std::span<const SensingLos> sensing, IntegrationCase integration,
                          double comm_los_delay = 0.0);

struct Decomposition {
    CirTensor shared;
    CirTensor non_shared;
};

/// Splits the per-target CIRs by the selector: shared sums targets with s_l = 1, non-shared the rest.
Decomposition decompose(std::span<const CirTensor> target_cirs, const SharingVector& vector);

/// Ratio of shared power to total power.
double sharing_degree(double shared_power, double total_power);

/// Per-cluster shared flags implied by the selected pairs.
std::vector<bool> shared_cluster_flags(std::span<const SharedPair> pairs, std::size_t cluster_count);

} // namespace isac
