// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "isac/communication.hpp"
#include "isac/config.hpp"
#include "isac/sensing.hpp"
#include "isac/sharing.hpp"
#include "isac/stochastic.hpp"

namespace isac {

struct TargetRecord {
    int id{0};
    SensingLos los;
    RcsMatrix rcs{RcsMatrix::Identity()};
    std::vector<CascadePath> paths;
    std::size_t tx_leg_clusters{0};
    std::size_t rx_leg_clusters{0};
    bool shared{false};
};

struct DropResult {
    std::uint64_t drop_id{0};
    LargeScaleParams comm_lsp;
    double comm_pathloss_db{0.0};
    /// Pruned stochastic clusters before feedback.
    ClusterSet comm_clusters_stochastic;
    /// Clusters used for the CIR, after feedback.
    ClusterSet comm_clusters;
    std::vector<bool> comm_shared_flags;
    CommCir comm;
    std::vector<TargetRecord> targets;
    CirTensor sensing_total;
    CirTensor sensing_shared;
    CirTensor sensing_non_shared;
    SharingState sharing;
    double sd_c{0.0};
    double sd_s{0.0};
};

/// Communication link on its own: LSPs, clusters, pruning and the CIR with nothing shared.
/// Uses the same substreams as `run_drop`, so it is the reference for the
/// no-sharing case.
CommLink generate_comm_link(const ScenarioConfig& config, std::uint64_t drop_id);
CirTensor baseline_comm_cir(const ScenarioConfig& config, std::uint64_t drop_id);

/// One full joint realization: sensing sub-channels and RCS, communication
/// LSPs and clusters, pruning, pair selection, feedback, CIR assembly,
/// decomposition and sharing degrees. Deterministic in (root_seed, drop_id).
DropResult run_drop(const ScenarioConfig& config, std::uint64_t drop_id);

/// Checks the decomposition, pairing and bookkeeping invariants of a drop.
/// Throws ModelError with drop context on the first failure.
void validate_drop(const DropResult& result, const ScenarioConfig& config);

/// Runs `fn(drop_id)` for drop ids [0, n_drops) on `threads` workers.
void for_each_drop(std::size_t n_drops, unsigned threads, const std::function<void(std::uint64_t)>& fn);

/// All drops of the config, ordered by drop id.
std::vector<DropResult> run_drops(const ScenarioConfig& config, unsigned threads = 1);

struct SweepPoint {
    std::size_t shared_count{0};
    std::vector<double> sd_c; // by drop id
    std::vector<double> sd_s;
    double mean_sd_c{0.0}, std_sd_c{0.0};
    double mean_sd_s{0.0}, std_sd_s{0.0};
};

struct CampaignResult {
    std::vector<SweepPoint> points;
    std::size_t n_drops{0};
};

/// Monte-Carlo sweep over shared-cluster counts. Every sweep point reuses drop
/// ids 0..n_drops-1, so points are paired drop by drop.
CampaignResult run_campaign(const ScenarioConfig& config, const std::vector<std::size_t>& shared_counts,
                            unsigned threads = 1);

} // namespace isac
