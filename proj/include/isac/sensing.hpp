// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "isac/antenna.hpp"
#include "isac/cir_tensor.hpp"
#include "isac/geometry.hpp"
#include "isac/node.hpp"
#include "isac/rng.hpp"
#include "isac/stochastic.hpp"

namespace isac {

using RcsMatrix = Eigen::Matrix2cd;

enum class RcsMode { fixed, stochastic_uniform };

/// Polarimetric target response.
///
/// Fixed mode returns `matrix` as is. Stochastic mode draws an RCS value in
/// [min_m2, max_m2] once per drop and returns sqrt(rcs) * `matrix`, so `matrix`
/// acts as the normalized polarization template.
struct RcsSpec {
    RcsMode mode{RcsMode::fixed};
    RcsMatrix matrix{RcsMatrix::Identity()};
    double min_m2{1.0};
    double max_m2{1.0};

    bool operator==(const RcsSpec& other) const {
        return mode == other.mode && matrix == other.matrix && min_m2 == other.min_m2 && max_m2 == other.max_m2;
    }
};

struct Target {
    int id{1};
    Point3 position{Point3::Zero()};
    Velocity3 velocity{Velocity3::Zero()};
    RcsSpec rcs{};

    bool operator==(const Target& other) const {
        return id == other.id && position == other.position && velocity == other.velocity && rcs == other.rcs;
    }
};

/// The angle arguments are accepted for angle-dependent responses; both modes
/// implemented here ignore them.
RcsMatrix evaluate_rcs(const RcsSpec& spec, const SphericalAngles& outgoing, const SphericalAngles& incident,
                       RandomEngine& rng);

enum class SensingClusterMode { los_only, full };
enum class PathlossMode { two_stage_38901, radar_equation };

struct SubChannelPolicy {
    SensingClusterMode mode{SensingClusterMode::los_only};
    LinkCondition leg_condition{LinkCondition::los};
    double carrier_hz{28e9};
    double prune_threshold_db{25.0};
    const ScenarioTable* table{nullptr};
};

struct SubChannels {
    ClusterSet tx_leg; // sensing TX -> target
    ClusterSet rx_leg; // target -> sensing RX
};

/// Generates both legs of the TX -> target -> RX cascade.
///
/// Leg delays are absolute (they include the leg's LoS delay). In LoS-only mode
/// each leg is a single specular ray along the geometric LoS direction with unit
/// amplitude. In full mode each leg is an independent stochastic cluster set,
/// pruned at `prune_threshold_db`.
SubChannels build_target_sub_channels(const Node& tx, const Target& target, const Node& rx,
                                      const SubChannelPolicy& policy, RandomEngine& rng);

struct CascadePath {
    std::size_t tx_cluster{0}, tx_ray{0};
    std::size_t rx_cluster{0}, rx_ray{0};
    double amplitude{0.0};
    double delay{0.0};
    SphericalAngles departure; // at the sensing TX
    SphericalAngles arrival;   // at the sensing RX
    SphericalAngles incident;  // arriving at the target
    SphericalAngles outgoing;  // leaving the target
    double xpr_linear{1.0};
    std::array<double, 4> phases{};
    double doppler_hz{0.0};
    double tx_leg_delay{0.0};
    double rx_leg_delay{0.0};
};

struct CascadeSettings {
    PathlossMode pathloss{PathlossMode::two_stage_38901};
    LinkCondition leg_condition{LinkCondition::los};
    double carrier_hz{28e9};
    Velocity3 target_velocity{Velocity3::Zero()};
    Velocity3 tx_velocity{Velocity3::Zero()};
    Velocity3 rx_velocity{Velocity3::Zero()};
};

/// Large-scale amplitude factor applied to every path of one target cascade.
double cascade_pathloss_amplitude(const CascadeSettings& settings, double tx_leg_distance, double rx_leg_distance);

/// Cartesian product of TX-leg and RX-leg rays. Delays add, amplitudes multiply
/// (times the large-scale factor), Doppler shifts of the two legs add and the
/// four joint phases are fresh uniform draws per path. The joint XPR combines
/// the legs' cross-polar leakage: 1/xpr = 1/xpr_tx + 1/xpr_rx. The target
/// response itself is applied at assembly time.
std::vector<CascadePath> cascade(const ClusterSet& tx_leg, const ClusterSet& rx_leg,
                                 const CascadeSettings& settings, RandomEngine& rng);

struct TargetCascade {
    int target_id{0};
    RcsMatrix rcs{RcsMatrix::Identity()};
    std::vector<CascadePath> paths;
};

/// Sensing CIR over all targets.
///
/// Paths are laid out target by target in input order. With `only_target` set,
/// the tensor keeps the full path axis but only that target's paths are filled,
/// so per-target tensors add element-wise to the total.
CirTensor assemble_sensing_cir(std::span<const TargetCascade> targets, const ArrayGeometry& tx_array,
                               const ArrayGeometry& rx_array, double wavelength, std::span<const double> time_samples,
                               std::optional<std::size_t> only_target = std::nullopt);

/// As above, filling only the paths of targets with `include[l]` set.
CirTensor assemble_sensing_cir(std::span<const TargetCascade> targets, const ArrayGeometry& tx_array,
                               const ArrayGeometry& rx_array, double wavelength, std::span<const double> time_samples,
                               const std::vector<bool>& include);

} // namespace isac
