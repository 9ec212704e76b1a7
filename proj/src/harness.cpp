// SPDX-License-Identifier: Apache-2.0
#include "isac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include "isac/rng.hpp"
#include "isac/stats.hpp"

namespace isac {

namespace {

const ScenarioTable& table_for(const ScenarioConfig& config) {
    if (config.parameter_table.empty())
        return ScenarioTable::inh_office();
    static std::mutex mutex;
    static std::map<std::string, ScenarioTable> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(config.parameter_table);
    if (it == cache.end())
        it = cache.emplace(config.parameter_table, ScenarioTable::load(config.parameter_table)).first;
    return it->second;
}

std::string target_stream(const Target& t, const char* what) {
    return "sensing/target/" + std::to_string(t.id) + "/" + what;
}

std::string drop_context(std::uint64_t drop_id) { return "drop " + std::to_string(drop_id) + ": "; }

} // namespace

CommLink generate_comm_link(const ScenarioConfig& config, std::uint64_t drop_id) {
    const ScenarioTable& table = table_for(config);
    CommLink link;
    link.tx = config.bs.node();
    link.rx = config.ut.node();

    RandomEngine lsp_rng = substream(config.root_seed, drop_id, "comm/lsp");
    link.lsp = draw_large_scale(table, config.comm_condition, config.carrier_hz, lsp_rng);

    RandomEngine cluster_rng = substream(config.root_seed, drop_id, "comm/clusters");
    const LinkGeometry geometry = LinkGeometry::between(link.tx.position, link.rx.position);
    link.clusters = prune_clusters(
        generate_clusters(table, link.lsp, geometry, config.carrier_hz, cluster_rng, "comm"),
        config.prune_threshold_db);

    const double pathloss_db = inh_pathloss_db(geometry.distance_m, config.carrier_hz, config.comm_condition);
    link.large_scale_gain = std::pow(10.0, -(pathloss_db + link.lsp.sf_db) / 20.0);
    apply_comm_doppler(link.clusters, link.rx.velocity, config.wavelength());
    return link;
}

CirTensor baseline_comm_cir(const ScenarioConfig& config, std::uint64_t drop_id) {
    const CommLink link = generate_comm_link(config, drop_id);
    const std::vector<bool> none(link.clusters.clusters.size(), false);
    CirTensor cir = assemble_comm_cir(link, config.wavelength(), config.time_samples, none).total;
    cir.drop_id = drop_id;
    return cir;
}

DropResult run_drop(const ScenarioConfig& config, std::uint64_t drop_id) {
    try {
        const ScenarioTable& table = table_for(config);
        const double wavelength = config.wavelength();
        const Node sensing_tx = config.sensing_tx_node();
        const Node sensing_rx = config.sensing_rx_node();

        DropResult result;
        result.drop_id = drop_id;

        // Sensing sub-channels, target responses and cascades.
        const SubChannelPolicy policy{config.sensing_cluster_mode, config.sensing_leg_condition, config.carrier_hz,
                                      config.prune_threshold_db, &table};
        std::vector<TargetCascade> cascades;
        std::vector<SensingLos> sensing_los;
        for (const Target& target : config.targets) {
            TargetRecord record;
            record.id = target.id;
            record.los.departure = los_angles(sensing_tx.position, target.position);
            record.los.arrival = los_angles(sensing_rx.position, target.position);
            record.los.delay = los_cascade_delay(sensing_tx.position, target.position, sensing_rx.position);

            RandomEngine leg_rng = substream(config.root_seed, drop_id, target_stream(target, "legs"));
            const SubChannels legs = build_target_sub_channels(sensing_tx, target, sensing_rx, policy, leg_rng);
            record.tx_leg_clusters = legs.tx_leg.clusters.size();
            record.rx_leg_clusters = legs.rx_leg.clusters.size();

            RandomEngine rcs_rng = substream(config.root_seed, drop_id, target_stream(target, "rcs"));
            record.rcs = evaluate_rcs(target.rcs, los_angles(target.position, sensing_rx.position),
                                      los_angles(target.position, sensing_tx.position), rcs_rng);

            const CascadeSettings settings{config.pathloss_mode, config.sensing_leg_condition, config.carrier_hz,
                                           target.velocity, sensing_tx.velocity, sensing_rx.velocity};
            RandomEngine cascade_rng = substream(config.root_seed, drop_id, target_stream(target, "cascade"));
            record.paths = cascade(legs.tx_leg, legs.rx_leg, settings, cascade_rng);

            cascades.push_back({target.id, record.rcs, record.paths});
            sensing_los.push_back(record.los);
            result.targets.push_back(std::move(record));
        }

        // Communication link.
        CommLink link = generate_comm_link(config, drop_id);
        result.comm_lsp = link.lsp;
        result.comm_pathloss_db =
            inh_pathloss_db(distance_3d(link.tx.position, link.rx.position), config.carrier_hz, config.comm_condition);
        result.comm_clusters_stochastic = link.clusters;

        // Shared-pair selection and feedback.
        const std::size_t n_targets = config.targets.size();
        const std::size_t n_clusters = link.clusters.clusters.size();
        result.sharing.target_ratio = config.shared_ratio;
        result.sharing.requested_count =
            config.shared_count ? *config.shared_count
                                : shared_count_from_ratio(config.shared_ratio, n_targets, n_targets);
        const std::size_t n_shared = std::min({result.sharing.requested_count, n_targets, n_clusters});

        const PairingSide side = pairing_side(config.integration_case);
        std::vector<SphericalAngles> target_angles;
        for (const auto& los : sensing_los)
            target_angles.push_back(side == PairingSide::departure ? los.departure : los.arrival);
        auto [pairs, vector] =
            select_shared_pairs(target_angles, link.clusters, n_shared, side, config.circular_azimuth_gap);
        result.sharing.pairs = std::move(pairs);
        result.sharing.vector = std::move(vector);
        for (std::size_t l = 0; l < n_targets; ++l)
            result.targets[l].shared = result.sharing.vector.is_shared(l);

        const double comm_los_delay = distance_3d(link.tx.position, link.rx.position) / kSpeedOfLight;
        link.clusters = apply_feedback(result.sharing.pairs, link.clusters, sensing_los, config.integration_case,
                                       comm_los_delay);
        apply_comm_doppler(link.clusters, link.rx.velocity, wavelength);
        result.comm_clusters = link.clusters;
        result.comm_shared_flags = shared_cluster_flags(result.sharing.pairs, link.clusters.clusters.size());

        result.comm = assemble_comm_cir(link, wavelength, config.time_samples, result.comm_shared_flags);
        for (CirTensor* t : {&result.comm.total, &result.comm.shared, &result.comm.non_shared})
            t->drop_id = drop_id;

        // Sensing CIR and its decomposition.
        const ArrayGeometry& tx_array = sensing_tx.array;
        const ArrayGeometry& rx_array = sensing_rx.array;
        result.sensing_total = assemble_sensing_cir(cascades, tx_array, rx_array, wavelength, config.time_samples);
        std::vector<bool> shared_targets(n_targets), other_targets(n_targets);
        for (std::size_t l = 0; l < n_targets; ++l) {
            shared_targets[l] = result.sharing.vector.is_shared(l);
            other_targets[l] = !shared_targets[l];
        }
        result.sensing_shared =
            assemble_sensing_cir(cascades, tx_array, rx_array, wavelength, config.time_samples, shared_targets);
        result.sensing_non_shared =
            assemble_sensing_cir(cascades, tx_array, rx_array, wavelength, config.time_samples, other_targets);
        result.sensing_shared.component = Component::shared;
        result.sensing_non_shared.component = Component::non_shared;
        for (CirTensor* t : {&result.sensing_total, &result.sensing_shared, &result.sensing_non_shared})
            t->drop_id = drop_id;

        result.sd_c = sharing_degree(result.comm.shared.energy_per_snapshot(), result.comm.total.energy_per_snapshot());
        result.sd_s = n_targets == 0 ? 0.0
                                     : sharing_degree(result.sensing_shared.energy_per_snapshot(),
                                                      result.sensing_total.energy_per_snapshot());
        return result;
    } catch (const ConfigError& e) {
        throw ConfigError(drop_context(drop_id) + e.what());
    } catch (const DegenerateGeometry& e) {
        throw DegenerateGeometry(drop_context(drop_id) + e.what());
    } catch (const DegenerateChannel& e) {
        throw DegenerateChannel(drop_context(drop_id) + e.what());
    } catch (const InvalidCarrier& e) {
        throw InvalidCarrier(drop_context(drop_id) + e.what());
    }
}

void validate_drop(const DropResult& r, const ScenarioConfig& config) {
    const std::string ctx = drop_context(r.drop_id);
    auto fail = [&](const std::string& what) { throw ModelError(ctx + what); };
    constexpr double tolerance = 1e-12;

    if (max_relative_error(r.comm.total, r.comm.shared + r.comm.non_shared) > tolerance)
        fail("communication CIR is not the sum of its shared and non-shared parts");
    if (r.sensing_total.size() > 0 &&
        max_relative_error(r.sensing_total, r.sensing_shared + r.sensing_non_shared) > tolerance)
        fail("sensing CIR is not the sum of its shared and non-shared parts");

    const auto& pairs = r.sharing.pairs;
    if (r.sharing.vector.size() != config.targets.size())
        fail("sharing vector length differs from the target count");
    if (r.sharing.vector.shared_count() != pairs.size())
        fail("sharing vector weight differs from the number of shared pairs");
    std::vector<bool> seen_target(config.targets.size(), false);
    std::vector<bool> seen_cluster(r.comm_clusters.clusters.size(), false);
    for (const auto& p : pairs) {
        if (p.target_index >= seen_target.size() || p.cluster_index >= seen_cluster.size())
            fail("shared pair index out of range");
        if (seen_target[p.target_index] || seen_cluster[p.cluster_index])
            fail("shared pairs reuse a target or cluster");
        seen_target[p.target_index] = seen_cluster[p.cluster_index] = true;
        if (!r.sharing.vector.is_shared(p.target_index))
            fail("paired target not marked in the sharing vector");
        const Cluster& c = r.comm_clusters.clusters[p.cluster_index];
        const SensingLos& los = r.targets[p.target_index].los;
        const bool departure = config.integration_case != IntegrationCase::rx_integrated;
        const bool arrival = config.integration_case != IntegrationCase::tx_integrated_monostatic;
        if (departure && (c.aod != los.departure.azimuth || c.zod != los.departure.zenith))
            fail("shared cluster departure centroid differs from the sensing LoS direction");
        if (arrival && (c.aoa != los.arrival.azimuth || c.zoa != los.arrival.zenith))
            fail("shared cluster arrival centroid differs from the sensing LoS direction");
    }

    const auto flagged = static_cast<std::size_t>(std::count(r.comm_shared_flags.begin(), r.comm_shared_flags.end(), true));
    if (flagged != pairs.size() || r.comm_shared_flags.size() != r.comm_clusters.clusters.size())
        fail("communication cluster bookkeeping does not add up");

    std::size_t sensing_paths = 0;
    for (const auto& t : r.targets) {
        sensing_paths += t.paths.size();
        for (const auto& p : t.paths)
            if (p.delay != p.tx_leg_delay + p.rx_leg_delay)
                fail("cascade delay is not the sum of its leg delays");
    }
    if (sensing_paths != r.sensing_total.path_count())
        fail("sensing path count differs from the CIR path axis");
    if (config.sensing_cluster_mode == SensingClusterMode::los_only && sensing_paths != config.targets.size())
        fail("LoS-only sensing must contribute exactly one path per target");

    if (!(r.sd_c >= 0.0 && r.sd_c <= 1.0 && r.sd_s >= 0.0 && r.sd_s <= 1.0))
        fail("sharing degree outside [0, 1]");
}

void for_each_drop(std::size_t n_drops, unsigned threads, const std::function<void(std::uint64_t)>& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n_drops, 1))));
    std::vector<std::exception_ptr> errors(n_drops);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n_drops; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }
    // Report the lowest failing drop so errors do not depend on scheduling.
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

std::vector<DropResult> run_drops(const ScenarioConfig& config, unsigned threads) {
    std::vector<DropResult> results(config.n_drops);
    for_each_drop(config.n_drops, threads, [&](std::uint64_t id) {
        results[id] = run_drop(config, id);
        validate_drop(results[id], config);
    });
    return results;
}

CampaignResult run_campaign(const ScenarioConfig& config, const std::vector<std::size_t>& shared_counts,
                            unsigned threads) {
    for (std::size_t count : shared_counts)
        if (count > config.targets.size())
            throw ConfigError("sweep count " + std::to_string(count) + " exceeds the " +
                              std::to_string(config.targets.size()) + " configured targets");
    CampaignResult campaign;
    campaign.n_drops = config.n_drops;
    for (std::size_t count : shared_counts) {
        ScenarioConfig point_config = config;
        point_config.shared_count = count;
        SweepPoint point;
        point.shared_count = count;
        point.sd_c.assign(config.n_drops, 0.0);
        point.sd_s.assign(config.n_drops, 0.0);
        for_each_drop(config.n_drops, threads, [&](std::uint64_t id) {
            const DropResult r = run_drop(point_config, id);
            validate_drop(r, point_config);
            point.sd_c[id] = r.sd_c;
            point.sd_s[id] = r.sd_s;
        });
        point.mean_sd_c = stats::mean(point.sd_c);
        point.std_sd_c = stats::stddev(point.sd_c);
        point.mean_sd_s = stats::mean(point.sd_s);
        point.std_sd_s = stats::stddev(point.sd_s);
        campaign.points.push_back(std::move(point));
    }
    return campaign;
}

} // namespace isac
