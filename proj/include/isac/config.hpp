// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "isac/antenna.hpp"
#include "isac/geometry.hpp"
#include "isac/node.hpp"
#include "isac/sensing.hpp"
#include "isac/sharing.hpp"
#include "isac/stochastic.hpp"

namespace isac {

/// Array description as written in the config file; angles in degrees.
struct ArrayConfig {
    std::vector<Point3> elements{Point3::Zero()};
    PatternKind pattern{PatternKind::isotropic};
    double slant_deg{0.0};
    double bearing_deg{0.0};

    ArrayGeometry geometry() const;
    bool operator==(const ArrayConfig& other) const {
        return elements == other.elements && pattern == other.pattern && slant_deg == other.slant_deg &&
               bearing_deg == other.bearing_deg;
    }
};

struct NodeConfig {
    Point3 position{Point3::Zero()};
    Velocity3 velocity{Velocity3::Zero()};
    ArrayConfig array{};

    Node node() const { return {position, velocity, array.geometry()}; }
    bool operator==(const NodeConfig& other) const {
        return position == other.position && velocity == other.velocity && array == other.array;
    }
};

enum class SensingMode { mono_static, bi_static };

struct ScenarioConfig {
    double carrier_hz{28e9};
    std::string scenario{"InH-Office"};
    /// Parameter table path; empty selects the bundled table.
    std::string parameter_table;
    NodeConfig bs{};
    NodeConfig ut{};
    SensingMode sensing_mode{SensingMode::mono_static};
    NodeConfig sensing_rx{};
    IntegrationCase integration_case{IntegrationCase::tx_integrated_monostatic};
    std::vector<Target> targets;
    SensingClusterMode sensing_cluster_mode{SensingClusterMode::los_only};
    LinkCondition comm_condition{LinkCondition::los};
    LinkCondition sensing_leg_condition{LinkCondition::los};
    double shared_ratio{0.0};
    /// Overrides `shared_ratio` when set.
    std::optional<std::size_t> shared_count;
    PathlossMode pathloss_mode{PathlossMode::two_stage_38901};
    double prune_threshold_db{25.0};
    bool circular_azimuth_gap{false};
    std::size_t n_drops{1};
    std::vector<double> time_samples{0.0};
    std::uint64_t root_seed{1};

    double wavelength() const { return kSpeedOfLight / carrier_hz; }
    Node sensing_tx_node() const { return bs.node(); }
    Node sensing_rx_node() const { return sensing_mode == SensingMode::mono_static ? bs.node() : sensing_rx.node(); }

    bool operator==(const ScenarioConfig&) const = default;
};

/// Throws ConfigError on the first violated constraint.
void validate(const ScenarioConfig& config);

/// Strict parse: unknown keys and wrong types are ConfigErrors.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json serialize_config(const ScenarioConfig& config);

/// FNV-1a hash of the canonical serialized config.
std::uint64_t config_hash(const ScenarioConfig& config);

/// Twelve targets on a 5 m ring at 1.5 m height spaced 30 deg apart, BS at
/// (0, 0, 1.5), UT at (10, 0, 1.5), mono-static LoS-only sensing.
ScenarioConfig reference_layout();

const char* to_string(IntegrationCase c);
const char* to_string(SensingClusterMode m);
const char* to_string(PathlossMode m);
const char* to_string(LinkCondition c);
const char* to_string(SensingMode m);
const char* to_string(PatternKind k);
const char* to_string(RcsMode m);

} // namespace isac
