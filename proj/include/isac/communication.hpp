// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "isac/cir_tensor.hpp"
#include "isac/node.hpp"
#include "isac/stochastic.hpp"

namespace isac {

/// BS -> UT link after pruning and shared-parameter feedback.
struct CommLink {
    Node tx;
    Node rx;
    LargeScaleParams lsp;
    ClusterSet clusters;
    /// Path loss and shadowing as a linear amplitude factor.
    double large_scale_gain{1.0};
};

struct CommCir {
    CirTensor total;
    CirTensor shared;
    CirTensor non_shared;
};

/// Doppler shift seen by a moving receiver along the ray's arrival direction.
double doppler_comm(const Ray& ray, const Velocity3& rx_velocity, double wavelength);

/// Writes `doppler_comm` into every ray of the set.
void apply_comm_doppler(ClusterSet& set, const Velocity3& rx_velocity, double wavelength);

/// Communication CIR, one path per ray in cluster order.
///
/// `shared_flags[n]` marks cluster n as shared. The total is assembled directly
/// over all clusters; the shared and non-shared tensors hold the flagged and
/// unflagged rays on the same path axis.
CommCir assemble_comm_cir(const CommLink& link, double wavelength, std::span<const double> time_samples,
                          const std::vector<bool>& shared_flags);

} // namespace isac
