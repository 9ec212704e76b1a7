// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "isac/geometry.hpp"
#include "isac/rng.hpp"

namespace isac {

enum class LinkCondition { los, nlos };

/// Log10-domain normal parameter whose mean and std are affine in log10(1 + fc/GHz).
struct FrequencyDependentLogNormal {
    double mu_base{0.0};
    double mu_slope{0.0};
    double sigma_base{0.0};
    double sigma_slope{0.0};

    double mean(double carrier_hz) const;
    double stddev(double carrier_hz) const;
};

/// One row (LOS or NLOS) of the scenario parameter table.
struct ConditionTable {
    std::size_t clusters{0};
    FrequencyDependentLogNormal lg_ds, lg_asd, lg_asa, lg_zsa, lg_zsd;
    double sf_std_db{0.0};
    double k_mu_db{0.0};
    double k_sigma_db{0.0};
    double r_tau{1.0};
    double xpr_mu_db{0.0};
    double xpr_sigma_db{0.0};
    double c_asd_deg{0.0};
    double c_asa_deg{0.0};
    double c_zsa_deg{0.0};
    double cluster_shadowing_std_db{0.0};
    double zod_offset_deg{0.0};
    /// LSP names in the order of `correlation` rows ("sf", "k", "ds", "asd", "asa", "zsd", "zsa").
    std::vector<std::string> correlation_order;
    Eigen::MatrixXd correlation;
};

struct ScenarioTable {
    std::string name;
    std::size_t rays_per_cluster{20};
    std::vector<double> ray_offsets;
    std::map<std::size_t, double> c_phi_nlos;
    std::map<std::size_t, double> c_theta_nlos;
    double cap_asd_deg{104.0}, cap_asa_deg{104.0}, cap_zsd_deg{52.0}, cap_zsa_deg{52.0};
    ConditionTable los;
    ConditionTable nlos;

    const ConditionTable& condition(LinkCondition c) const { return c == LinkCondition::los ? los : nlos; }

    static ScenarioTable load(const std::filesystem::path& path);
    static ScenarioTable load_from_string(const std::string& json_text);
    /// The bundled InH-Office table.
    static const ScenarioTable& inh_office();
};

std::filesystem::path default_table_path();

struct LargeScaleParams {
    double ds{0.0};  // seconds
    double asa{0.0}; // radians
    double asd{0.0};
    double zsa{0.0};
    double zsd{0.0};
    double sf_db{0.0};
    double k_db{0.0};
    bool los{false};

    bool operator==(const LargeScaleParams&) const = default;
};

enum Polarization : std::size_t { theta_theta = 0, theta_phi = 1, phi_theta = 2, phi_phi = 3 };

struct Ray {
    double amplitude{0.0};
    double delay{0.0};
    double aoa{0.0}, zoa{0.0}, aod{0.0}, zod{0.0};
    /// Offsets from the cluster centroid in the order aoa, zoa, aod, zod.
    std::array<double, 4> offsets{};
    /// Linear XPR; +inf for the specular LoS ray.
    double xpr_linear{1.0};
    /// Initial phases indexed by `Polarization`.
    std::array<double, 4> phases{};
    double doppler_hz{0.0};
    bool specular{false};

    SphericalAngles arrival() const { return {zoa, aoa}; }
    SphericalAngles departure() const { return {zod, aod}; }

    bool operator==(const Ray&) const = default;
};

struct Cluster {
    std::size_t index{0};
    double power{0.0};
    /// Share of `power` carried by the specular LoS ray.
    double specular_power{0.0};
    double delay{0.0};
    double aoa{0.0}, zoa{0.0}, aod{0.0}, zod{0.0};
    std::vector<Ray> rays;

    bool operator==(const Cluster&) const = default;
};

struct ClusterSet {
    std::vector<Cluster> clusters;
    bool los{false};
    std::string link_id;
    /// 3D distance between the link end points.
    double distance_m{0.0};

    double total_power() const;
    std::size_t ray_count() const;

    bool operator==(const ClusterSet&) const = default;
};

/// End-point geometry of one link as seen from each side.
struct LinkGeometry {
    SphericalAngles departure; // at the transmitter, toward the receiver
    SphericalAngles arrival;   // at the receiver, toward the transmitter
    double distance_m{0.0};

    static LinkGeometry between(const Point3& tx, const Point3& rx);
};

LargeScaleParams draw_large_scale(const ScenarioTable& table, LinkCondition condition, double carrier_hz,
                                  RandomEngine& rng);

/// Small-scale clusters and rays of one link.
///
/// Delays are exponential, scaled by the delay spread and shifted so the first
/// cluster sits at zero. Powers decay with delay under per-cluster shadowing and
/// are normalized to unit sum. In LOS the first cluster additionally carries the
/// specular ray and the powers are K-factor weighted; the set still sums to one.
/// Every cluster has `rays_per_cluster` offset rays with random coupling,
/// lognormal XPR and uniform initial phases.
ClusterSet generate_clusters(const ScenarioTable& table, const LargeScaleParams& lsp, const LinkGeometry& geometry,
                             double carrier_hz, RandomEngine& rng, std::string link_id = {});

/// Removes clusters whose scattered power (excluding any specular ray) lies
/// more than `threshold_db` below the largest scattered power, then
/// renormalizes the remainder to unit power. The cluster with the largest total
/// power is always kept. Survivors are re-indexed from 0.
ClusterSet prune_clusters(const ClusterSet& set, double threshold_db = 25.0);

/// InH-Office path loss in dB. Distances below 1 m are evaluated at 1 m.
double inh_pathloss_db(double distance_3d_m, double carrier_hz, LinkCondition condition);

/// Recomputes ray angles from the cluster centroid and the stored ray offsets.
void realign_rays(Cluster& cluster);

} // namespace isac
