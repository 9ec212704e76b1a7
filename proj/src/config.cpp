// SPDX-License-Identifier: Apache-2.0
#include "isac/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "isac/rng.hpp"

namespace isac {

using nlohmann::json;

const char* to_string(IntegrationCase c) {
    switch (c) {
    case IntegrationCase::tx_integrated_monostatic: return "tx_integrated_monostatic";
    case IntegrationCase::rx_integrated: return "rx_integrated";
    case IntegrationCase::txrx_integrated_bistatic: return "txrx_integrated_bistatic";
    }
    return "?";
}
const char* to_string(SensingClusterMode m) { return m == SensingClusterMode::los_only ? "los_only" : "full"; }
const char* to_string(PathlossMode m) {
    return m == PathlossMode::two_stage_38901 ? "two_stage_38901" : "radar_equation";
}
const char* to_string(LinkCondition c) { return c == LinkCondition::los ? "los" : "nlos"; }
const char* to_string(SensingMode m) { return m == SensingMode::mono_static ? "mono_static" : "bi_static"; }
const char* to_string(PatternKind k) { return k == PatternKind::isotropic ? "isotropic" : "sector_38901"; }
const char* to_string(RcsMode m) { return m == RcsMode::fixed ? "fixed" : "stochastic_uniform"; }

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object())
        throw ConfigError(where + ": expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        if (!keys.count(key))
            throw ConfigError(where + ": unknown key \"" + key + "\"");
}

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
    return j.contains(key) ? get<T>(j, key, where) : fallback;
}

template <typename Enum, std::size_t N>
Enum parse_enum(const json& j, const char* key, Enum fallback, const std::array<Enum, N>& values,
                const std::string& where) {
    if (!j.contains(key))
        return fallback;
    const auto text = get<std::string>(j, key, where);
    for (Enum v : values)
        if (text == to_string(v))
            return v;
    throw ConfigError(where + "." + key + ": unknown value \"" + text + "\"");
}

Point3 parse_point(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3)
        throw ConfigError(where + ": expected [x, y, z]");
    Point3 p;
    for (int k = 0; k < 3; ++k) {
        if (!j[k].is_number())
            throw ConfigError(where + ": coordinates must be numbers");
        p[k] = j[k].get<double>();
    }
    if (!p.allFinite())
        throw ConfigError(where + ": coordinates must be finite");
    return p;
}

json point_json(const Point3& p) { return json::array({p.x(), p.y(), p.z()}); }

ArrayConfig parse_array(const json& j, double wavelength, const std::string& where) {
    check_keys(j, {"elements", "ula", "pattern", "slant_deg", "bearing_deg"}, where);
    ArrayConfig a;
    if (j.contains("elements") && j.contains("ula"))
        throw ConfigError(where + ": give either \"elements\" or \"ula\", not both");
    if (j.contains("elements")) {
        const auto& list = j.at("elements");
        if (!list.is_array() || list.empty())
            throw ConfigError(where + ".elements: expected a non-empty list");
        a.elements.clear();
        for (std::size_t k = 0; k < list.size(); ++k)
            a.elements.push_back(parse_point(list[k], where + ".elements[" + std::to_string(k) + "]"));
    } else if (j.contains("ula")) {
        const auto& u = j.at("ula");
        const std::string w = where + ".ula";
        check_keys(u, {"count", "spacing_m", "spacing_wavelengths", "axis"}, w);
        const auto count = get<std::size_t>(u, "count", w);
        double spacing = 0.5 * wavelength;
        if (u.contains("spacing_m") && u.contains("spacing_wavelengths"))
            throw ConfigError(w + ": give either spacing_m or spacing_wavelengths");
        if (u.contains("spacing_m"))
            spacing = get<double>(u, "spacing_m", w);
        if (u.contains("spacing_wavelengths"))
            spacing = get<double>(u, "spacing_wavelengths", w) * wavelength;
        const Point3 axis = u.contains("axis") ? parse_point(u.at("axis"), w + ".axis") : Point3::UnitY();
        if (!(axis.norm() > 0.0))
            throw ConfigError(w + ".axis: must be non-zero");
        a.elements = ArrayGeometry::uniform_linear(count, spacing, axis).element_positions;
    }
    a.pattern = parse_enum(j, "pattern", PatternKind::isotropic,
                           std::array{PatternKind::isotropic, PatternKind::sector_38901}, where);
    a.slant_deg = get_or(j, "slant_deg", 0.0, where);
    a.bearing_deg = get_or(j, "bearing_deg", 0.0, where);
    return a;
}

json array_json(const ArrayConfig& a) {
    json elements = json::array();
    for (const auto& e : a.elements)
        elements.push_back(point_json(e));
    return {{"elements", elements},
            {"pattern", to_string(a.pattern)},
            {"slant_deg", a.slant_deg},
            {"bearing_deg", a.bearing_deg}};
}

NodeConfig parse_node(const json& j, double wavelength, const std::string& where) {
    check_keys(j, {"position", "velocity", "array"}, where);
    NodeConfig n;
    if (!j.contains("position"))
        throw ConfigError(where + ": missing position");
    n.position = parse_point(j.at("position"), where + ".position");
    if (j.contains("velocity"))
        n.velocity = parse_point(j.at("velocity"), where + ".velocity");
    if (j.contains("array"))
        n.array = parse_array(j.at("array"), wavelength, where + ".array");
    return n;
}

json node_json(const NodeConfig& n) {
    return {{"position", point_json(n.position)}, {"velocity", point_json(n.velocity)}, {"array", array_json(n.array)}};
}

RcsMatrix parse_rcs_matrix(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 4)
        throw ConfigError(where + ": expected four [re, im] entries (tt, tp, pt, pp)");
    RcsMatrix m;
    for (int k = 0; k < 4; ++k) {
        const auto& e = j[k];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw ConfigError(where + ": entries must be [re, im]");
        m(k / 2, k % 2) = {e[0].get<double>(), e[1].get<double>()};
    }
    return m;
}

json rcs_matrix_json(const RcsMatrix& m) {
    json out = json::array();
    for (int k = 0; k < 4; ++k)
        out.push_back(json::array({m(k / 2, k % 2).real(), m(k / 2, k % 2).imag()}));
    return out;
}

RcsSpec parse_rcs(const json& j, const std::string& where) {
    check_keys(j, {"mode", "matrix", "range_m2"}, where);
    RcsSpec r;
    r.mode = parse_enum(j, "mode", RcsMode::fixed, std::array{RcsMode::fixed, RcsMode::stochastic_uniform}, where);
    if (j.contains("matrix"))
        r.matrix = parse_rcs_matrix(j.at("matrix"), where + ".matrix");
    if (r.mode == RcsMode::stochastic_uniform) {
        const auto range = get<std::vector<double>>(j, "range_m2", where);
        if (range.size() != 2 || range[0] < 0.0 || range[1] < range[0])
            throw ConfigError(where + ".range_m2: expected [min, max] with 0 <= min <= max");
        r.min_m2 = range[0];
        r.max_m2 = range[1];
    } else if (j.contains("range_m2")) {
        throw ConfigError(where + ".range_m2: only valid in stochastic_uniform mode");
    }
    return r;
}

json rcs_json(const RcsSpec& r) {
    json out{{"mode", to_string(r.mode)}, {"matrix", rcs_matrix_json(r.matrix)}};
    if (r.mode == RcsMode::stochastic_uniform)
        out["range_m2"] = json::array({r.min_m2, r.max_m2});
    return out;
}

Target parse_target(const json& j, const std::string& where) {
    check_keys(j, {"id", "position", "velocity", "rcs"}, where);
    Target t;
    t.id = get<int>(j, "id", where);
    t.position = parse_point(j.at("position"), where + ".position");
    if (j.contains("velocity"))
        t.velocity = parse_point(j.at("velocity"), where + ".velocity");
    if (j.contains("rcs"))
        t.rcs = parse_rcs(j.at("rcs"), where + ".rcs");
    return t;
}

json target_json(const Target& t) {
    return {{"id", t.id},
            {"position", point_json(t.position)},
            {"velocity", point_json(t.velocity)},
            {"rcs", rcs_json(t.rcs)}};
}

std::vector<Target> parse_target_ring(const json& j, int first_id, const std::string& where) {
    check_keys(j, {"count", "radius_m", "height_m", "center", "start_deg", "spacing_deg", "velocity", "rcs"}, where);
    const auto count = get<std::size_t>(j, "count", where);
    const double radius = get<double>(j, "radius_m", where);
    const double height = get_or(j, "height_m", 1.5, where);
    const double start = get_or(j, "start_deg", 0.0, where);
    const double spacing = get_or(j, "spacing_deg", 360.0 / static_cast<double>(std::max<std::size_t>(count, 1)), where);
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    if (j.contains("center")) {
        const auto c = get<std::vector<double>>(j, "center", where);
        if (c.size() != 2)
            throw ConfigError(where + ".center: expected [x, y]");
        center = {c[0], c[1]};
    }
    const Velocity3 velocity = j.contains("velocity") ? parse_point(j.at("velocity"), where + ".velocity")
                                                      : Velocity3::Zero();
    const RcsSpec rcs = j.contains("rcs") ? parse_rcs(j.at("rcs"), where + ".rcs") : RcsSpec{};
    std::vector<Target> out;
    for (std::size_t k = 0; k < count; ++k) {
        const double phi = deg2rad(start + spacing * static_cast<double>(k));
        Target t;
        t.id = first_id + static_cast<int>(k);
        t.position = {center.x() + radius * std::cos(phi), center.y() + radius * std::sin(phi), height};
        t.velocity = velocity;
        t.rcs = rcs;
        out.push_back(t);
    }
    return out;
}

double parse_ratio(const json& j, const std::string& where) {
    if (j.is_number())
        return j.get<double>();
    if (j.is_string()) {
        const auto text = j.get<std::string>();
        const auto slash = text.find('/');
        try {
            if (slash == std::string::npos)
                return std::stod(text);
            return std::stod(text.substr(0, slash)) / std::stod(text.substr(slash + 1));
        } catch (const std::exception&) {
            throw ConfigError(where + ": cannot parse ratio \"" + text + "\"");
        }
    }
    throw ConfigError(where + ": expected a number or \"a/b\"");
}

} // namespace

ArrayGeometry ArrayConfig::geometry() const {
    ArrayGeometry g;
    g.element_positions = elements;
    g.pattern.kind = pattern;
    g.pattern.polarization_slant = deg2rad(slant_deg);
    g.pattern.bearing = deg2rad(bearing_deg);
    return g;
}

void validate(const ScenarioConfig& c) {
    if (!(c.carrier_hz > 0.0) || !std::isfinite(c.carrier_hz))
        throw ConfigError("carrier_hz must be positive");
    if (c.scenario != "InH-Office")
        throw ConfigError("scenario \"" + c.scenario + "\" is not supported (only InH-Office)");
    if (!(c.shared_ratio >= 0.0 && c.shared_ratio <= 1.0))
        throw ConfigError("shared_ratio must lie in [0, 1]");
    if (c.shared_count && *c.shared_count > c.targets.size())
        throw ConfigError("shared_count exceeds the number of targets");
    if (c.n_drops < 1)
        throw ConfigError("n_drops must be at least 1");
    if (c.time_samples.empty())
        throw ConfigError("time_samples_s must not be empty");
    if (!(c.prune_threshold_db >= 0.0))
        throw ConfigError("prune_threshold_db must be non-negative");
    for (const auto* node : {&c.bs, &c.ut, &c.sensing_rx})
        if (node->array.elements.empty())
            throw ConfigError("antenna arrays need at least one element");
    if (c.bs.position == c.ut.position)
        throw ConfigError("bs and ut positions coincide");
    const Point3 srx = c.sensing_rx_node().position;
    if (c.sensing_mode == SensingMode::bi_static && srx == c.bs.position)
        throw ConfigError("bi-static sensing needs a sensing_rx distinct from the bs");
    if (c.integration_case != IntegrationCase::tx_integrated_monostatic &&
        (c.sensing_mode != SensingMode::bi_static || srx != c.ut.position))
        throw ConfigError(std::string("integration case ") + to_string(c.integration_case) +
                          " requires bi-static sensing with the sensing receiver at the ut");
    std::set<int> ids;
    for (const auto& t : c.targets) {
        if (!ids.insert(t.id).second)
            throw ConfigError("duplicate target id " + std::to_string(t.id));
        if (t.position == c.bs.position || t.position == srx)
            throw ConfigError("target " + std::to_string(t.id) + " coincides with a sensing node");
        if (!t.position.allFinite() || !t.velocity.allFinite())
            throw ConfigError("target " + std::to_string(t.id) + " has non-finite coordinates");
        if (t.rcs.min_m2 < 0.0 || t.rcs.max_m2 < t.rcs.min_m2)
            throw ConfigError("target " + std::to_string(t.id) + " has an invalid RCS range");
    }
}

ScenarioConfig parse_config(const json& j) {
    const std::string w = "config";
    check_keys(j,
               {"carrier_hz", "scenario", "parameter_table", "bs", "ut", "sensing_mode", "sensing_rx",
                "integration_case", "targets", "target_ring", "sensing_cluster_mode", "comm_condition",
                "sensing_leg_condition", "shared_ratio", "shared_count", "pathloss_mode", "prune_threshold_db",
                "circular_azimuth_gap", "n_drops", "time_samples_s", "root_seed"},
               w);
    ScenarioConfig c;
    c.carrier_hz = get_or(j, "carrier_hz", c.carrier_hz, w);
    if (!(c.carrier_hz > 0.0))
        throw ConfigError("carrier_hz must be positive");
    const double wavelength = c.wavelength();
    c.scenario = get_or(j, "scenario", c.scenario, w);
    c.parameter_table = get_or(j, "parameter_table", c.parameter_table, w);
    if (!j.contains("bs") || !j.contains("ut"))
        throw ConfigError("config: bs and ut are required");
    c.bs = parse_node(j.at("bs"), wavelength, w + ".bs");
    c.ut = parse_node(j.at("ut"), wavelength, w + ".ut");
    c.sensing_mode = parse_enum(j, "sensing_mode", c.sensing_mode,
                                std::array{SensingMode::mono_static, SensingMode::bi_static}, w);
    if (j.contains("sensing_rx"))
        c.sensing_rx = parse_node(j.at("sensing_rx"), wavelength, w + ".sensing_rx");
    else
        c.sensing_rx = c.sensing_mode == SensingMode::bi_static ? c.ut : c.bs;
    c.integration_case = parse_enum(j, "integration_case", c.integration_case,
                                    std::array{IntegrationCase::tx_integrated_monostatic,
                                               IntegrationCase::rx_integrated,
                                               IntegrationCase::txrx_integrated_bistatic},
                                    w);
    if (j.contains("targets")) {
        const auto& list = j.at("targets");
        if (!list.is_array())
            throw ConfigError("config.targets: expected a list");
        for (std::size_t k = 0; k < list.size(); ++k)
            c.targets.push_back(parse_target(list[k], w + ".targets[" + std::to_string(k) + "]"));
    }
    if (j.contains("target_ring")) {
        int next_id = 1;
        for (const auto& t : c.targets)
            next_id = std::max(next_id, t.id + 1);
        auto ring = parse_target_ring(j.at("target_ring"), next_id, w + ".target_ring");
        c.targets.insert(c.targets.end(), ring.begin(), ring.end());
    }
    c.sensing_cluster_mode = parse_enum(j, "sensing_cluster_mode", c.sensing_cluster_mode,
                                        std::array{SensingClusterMode::los_only, SensingClusterMode::full}, w);
    c.comm_condition =
        parse_enum(j, "comm_condition", c.comm_condition, std::array{LinkCondition::los, LinkCondition::nlos}, w);
    c.sensing_leg_condition = parse_enum(j, "sensing_leg_condition", c.sensing_leg_condition,
                                         std::array{LinkCondition::los, LinkCondition::nlos}, w);
    if (j.contains("shared_ratio"))
        c.shared_ratio = parse_ratio(j.at("shared_ratio"), w + ".shared_ratio");
    if (j.contains("shared_count") && !j.at("shared_count").is_null())
        c.shared_count = get<std::size_t>(j, "shared_count", w);
    c.pathloss_mode = parse_enum(j, "pathloss_mode", c.pathloss_mode,
                                 std::array{PathlossMode::two_stage_38901, PathlossMode::radar_equation}, w);
    c.prune_threshold_db = get_or(j, "prune_threshold_db", c.prune_threshold_db, w);
    c.circular_azimuth_gap = get_or(j, "circular_azimuth_gap", c.circular_azimuth_gap, w);
    c.n_drops = get_or(j, "n_drops", c.n_drops, w);
    c.time_samples = get_or(j, "time_samples_s", c.time_samples, w);
    c.root_seed = get_or(j, "root_seed", c.root_seed, w);
    validate(c);
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    try {
        return parse_config(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

json serialize_config(const ScenarioConfig& c) {
    json targets = json::array();
    for (const auto& t : c.targets)
        targets.push_back(target_json(t));
    json j{{"carrier_hz", c.carrier_hz},
           {"scenario", c.scenario},
           {"bs", node_json(c.bs)},
           {"ut", node_json(c.ut)},
           {"sensing_mode", to_string(c.sensing_mode)},
           {"sensing_rx", node_json(c.sensing_rx)},
           {"integration_case", to_string(c.integration_case)},
           {"targets", targets},
           {"sensing_cluster_mode", to_string(c.sensing_cluster_mode)},
           {"comm_condition", to_string(c.comm_condition)},
           {"sensing_leg_condition", to_string(c.sensing_leg_condition)},
           {"shared_ratio", c.shared_ratio},
           {"pathloss_mode", to_string(c.pathloss_mode)},
           {"prune_threshold_db", c.prune_threshold_db},
           {"circular_azimuth_gap", c.circular_azimuth_gap},
           {"n_drops", c.n_drops},
           {"time_samples_s", c.time_samples},
           {"root_seed", c.root_seed}};
    if (!c.parameter_table.empty())
        j["parameter_table"] = c.parameter_table;
    if (c.shared_count)
        j["shared_count"] = *c.shared_count;
    return j;
}

std::uint64_t config_hash(const ScenarioConfig& config) { return fnv1a64(serialize_config(config).dump()); }

ScenarioConfig reference_layout() {
    ScenarioConfig c;
    c.bs.position = {0.0, 0.0, 1.5};
    c.ut.position = {10.0, 0.0, 1.5};
    c.sensing_rx = c.bs;
    for (int k = 0; k < 12; ++k) {
        const double phi = deg2rad(30.0 * k);
        Target t;
        t.id = k + 1;
        t.position = {5.0 * std::cos(phi), 5.0 * std::sin(phi), 1.5};
        c.targets.push_back(t);
    }
    c.shared_ratio = 1.0 / 6.0;
    validate(c);
    return c;
}

} // namespace isac
