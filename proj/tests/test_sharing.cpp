// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "isac/errors.hpp"
#include "isac/rng.hpp"
#include "isac/sharing.hpp"
#include "oracles.hpp"

using namespace isac;

namespace {

SphericalAngles dir_deg(double zenith, double azimuth) { return {deg2rad(zenith), deg2rad(azimuth)}; }

ClusterSet clusters_at(const std::vector<SphericalAngles>& departures) {
    ClusterSet set;
    for (std::size_t n = 0; n < departures.size(); ++n) {
        Cluster c;
        c.index = n;
        c.power = 1.0 / departures.size();
        c.aod = departures[n].azimuth;
        c.zod = departures[n].zenith;
        c.aoa = -departures[n].azimuth;
        c.zoa = M_PI - departures[n].zenith;
        c.delay = 1e-9 * n;
        for (int m = 0; m < 3; ++m) {
            Ray r;
            r.offsets = {0.01 * m, -0.02 * m, 0.03 * m, 0.005 * m};
            r.delay = c.delay;
            r.amplitude = 0.1;
            c.rays.push_back(r);
        }
        realign_rays(c);
        set.clusters.push_back(c);
    }
    return set;
}

CirTensor random_cir(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CirTensor t(2, 3, 4, 2);
    for (Eigen::Index i = 0; i < t.data().size(); ++i)
        t.data()(i) = {g(rng), g(rng)};
    return t;
}

} // namespace

TEST_CASE("angular_gap examples") {
    const auto same = angular_gap(dir_deg(90, 30), dir_deg(90, 30));
    CHECK(same.aod == 0.0);
    CHECK(same.zod == 0.0);
    CHECK(same.score == 0.0);

    const auto g = angular_gap(dir_deg(90, 50), dir_deg(90, 30));
    CHECK(g.score == doctest::Approx(0.5 * 20.0 / 360.0));
    CHECK(g.score == doctest::Approx(0.0278).epsilon(1e-3));

    const auto far = angular_gap(SphericalAngles{0.0, 0.0}, SphericalAngles{M_PI, std::nextafter(2 * M_PI, 0.0)});
    CHECK(far.score == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(far.score <= 1.0);
}

TEST_CASE("angular_gap compares azimuths in [0, 2 pi)") {
    // -30 deg is 330 deg: 330 deg away from 0 raw, 30 deg circularly.
    const auto raw = angular_gap(dir_deg(90, -30), dir_deg(90, 0));
    CHECK(rad2deg(raw.aod) == doctest::Approx(330.0));
    const auto circ = angular_gap(dir_deg(90, -30), dir_deg(90, 0), true);
    CHECK(rad2deg(circ.aod) == doctest::Approx(30.0));
}

TEST_CASE("select_shared_pairs examples") {
    const std::vector<SphericalAngles> targets{dir_deg(90, 30), dir_deg(90, 150)};
    const auto comm = clusters_at({dir_deg(90, 35), dir_deg(90, 140)});
    auto [pairs, s] = select_shared_pairs(targets, comm, 2);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].target_index == 0);
    CHECK(pairs[0].cluster_index == 0);
    CHECK(pairs[1].target_index == 1);
    CHECK(pairs[1].cluster_index == 1);
    CHECK(s.s == std::vector<int>{1, 1});

    auto [none, zero] = select_shared_pairs(targets, comm, 0);
    CHECK(none.empty());
    CHECK(zero.s == std::vector<int>{0, 0});

    CHECK_THROWS_AS(select_shared_pairs(targets, comm, 3), ConfigError);
}

TEST_CASE("ratio 1/6 of 12 targets shares two") {
    CHECK(shared_count_from_ratio(1.0 / 6.0, 12, 12) == 2);
    CHECK(shared_count_from_ratio(0.0, 12, 12) == 0);
    CHECK(shared_count_from_ratio(1.0, 12, 9) == 9);
    CHECK(shared_count_from_ratio(0.125, 12, 12) == 2); // 1.5 rounds up
    CHECK_THROWS_AS(shared_count_from_ratio(1.5, 12, 12), ConfigError);

    std::vector<SphericalAngles> targets;
    for (int k = 0; k < 12; ++k)
        targets.push_back(dir_deg(90, 30 * k));
    const auto comm = clusters_at({dir_deg(90, 0), dir_deg(80, 100), dir_deg(95, -60), dir_deg(70, 200)});
    auto [pairs, s] = select_shared_pairs(targets, comm, shared_count_from_ratio(1.0 / 6.0, 12, 4));
    CHECK(s.shared_count() == 2);
    CHECK(pairs.size() == 2);
}

TEST_CASE("ties resolve to the lowest indices") {
    const std::vector<SphericalAngles> targets{dir_deg(90, 10), dir_deg(90, 10)};
    const auto comm = clusters_at({dir_deg(90, 20), dir_deg(90, 20)});
    auto [pairs, s] = select_shared_pairs(targets, comm, 2);
    CHECK(pairs[0].target_index == 0);
    CHECK(pairs[0].cluster_index == 0);
    CHECK(pairs[1].target_index == 1);
    CHECK(pairs[1].cluster_index == 1);
}

TEST_CASE("greedy selection matches the sequential argmin oracle") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> az(-M_PI, M_PI), zen(0, M_PI);
    std::uniform_int_distribution<int> size(1, 5);
    for (int instance = 0; instance < 1000; ++instance) {
        const std::size_t L = size(rng), N = size(rng);
        std::vector<SphericalAngles> targets;
        std::vector<SphericalAngles> dirs;
        for (std::size_t l = 0; l < L; ++l)
            targets.push_back({zen(rng), az(rng)});
        for (std::size_t n = 0; n < N; ++n)
            dirs.push_back({zen(rng), az(rng)});
        const auto comm = clusters_at(dirs);
        std::vector<std::vector<double>> score(L, std::vector<double>(N));
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t n = 0; n < N; ++n)
                score[l][n] = oracle::pairing_score(targets[l].azimuth, targets[l].zenith, comm.clusters[n].aod,
                                                    comm.clusters[n].zod);
        const std::size_t count = std::min(L, N);
        const auto expected = oracle::sequential_argmin(score, count);
        auto [pairs, s] = select_shared_pairs(targets, comm, count);
        REQUIRE(pairs.size() == expected.size());
        for (std::size_t k = 0; k < count; ++k) {
            CHECK(pairs[k].target_index == expected[k].first);
            CHECK(pairs[k].cluster_index == expected[k].second);
            CHECK(pairs[k].score == doctest::Approx(score[expected[k].first][expected[k].second]).epsilon(1e-12));
        }
    }
}

TEST_CASE("apply_feedback") {
    const auto comm = clusters_at({dir_deg(80, 10), dir_deg(100, -120), dir_deg(60, 170)});
    std::vector<SensingLos> sensing{{dir_deg(90, 30), dir_deg(90, 30), 4e-8},
                                    {dir_deg(85, -100), dir_deg(95, 60), 5e-8}};
    const std::vector<SharedPair> none;
    CHECK(apply_feedback(none, comm, sensing, IntegrationCase::txrx_integrated_bistatic) == comm);

    const std::vector<SharedPair> pairs{{0, 2, 0.0}, {1, 0, 0.0}};

    const auto c1 = apply_feedback(pairs, comm, sensing, IntegrationCase::tx_integrated_monostatic);
    CHECK(c1.clusters[2].aod == sensing[0].departure.azimuth);
    CHECK(c1.clusters[2].zod == sensing[0].departure.zenith);
    CHECK(c1.clusters[2].aoa == comm.clusters[2].aoa);
    CHECK(c1.clusters[2].delay == comm.clusters[2].delay);
    CHECK(c1.clusters[1] == comm.clusters[1]);
    for (const auto& r : c1.clusters[2].rays)
        CHECK(r.aod == doctest::Approx(wrap_azimuth(sensing[0].departure.azimuth + r.offsets[2])));

    const auto c2 = apply_feedback(pairs, comm, sensing, IntegrationCase::rx_integrated);
    CHECK(c2.clusters[0].aoa == sensing[1].arrival.azimuth);
    CHECK(c2.clusters[0].zoa == sensing[1].arrival.zenith);
    CHECK(c2.clusters[0].aod == comm.clusters[0].aod);

    const double comm_los = 10.0 / kSpeedOfLight;
    const auto c3 = apply_feedback(pairs, comm, sensing, IntegrationCase::txrx_integrated_bistatic, comm_los);
    CHECK(c3.clusters[0].aod == sensing[1].departure.azimuth);
    CHECK(c3.clusters[0].zod == sensing[1].departure.zenith);
    CHECK(c3.clusters[0].aoa == sensing[1].arrival.azimuth);
    CHECK(c3.clusters[0].zoa == sensing[1].arrival.zenith);
    CHECK(c3.clusters[0].delay == doctest::Approx(5e-8 - comm_los));
    CHECK(c3.clusters[0].rays[1].delay == c3.clusters[0].delay);

    for (auto c : {IntegrationCase::tx_integrated_monostatic, IntegrationCase::rx_integrated,
                   IntegrationCase::txrx_integrated_bistatic}) {
        const auto once = apply_feedback(pairs, comm, sensing, c, comm_los);
        CHECK(apply_feedback(pairs, once, sensing, c, comm_los) == once);
    }

    const std::vector<SharedPair> bad_cluster{{0, 7, 0.0}};
    CHECK_THROWS_AS(apply_feedback(bad_cluster, comm, sensing, IntegrationCase::rx_integrated), ConfigError);
    const std::vector<SharedPair> bad_target{{5, 0, 0.0}};
    CHECK_THROWS_AS(apply_feedback(bad_target, comm, sensing, IntegrationCase::rx_integrated), ConfigError);
}

TEST_CASE("rx-integrated pairing uses arrival angles") {
    CHECK(pairing_side(IntegrationCase::rx_integrated) == PairingSide::arrival);
    CHECK(pairing_side(IntegrationCase::tx_integrated_monostatic) == PairingSide::departure);
    CHECK(pairing_side(IntegrationCase::txrx_integrated_bistatic) == PairingSide::departure);
    // Arrival azimuths are the negated departure ones in clusters_at.
    const auto comm = clusters_at({dir_deg(90, 40), dir_deg(90, -40)});
    const std::vector<SphericalAngles> target{dir_deg(90, 40)};
    CHECK(select_shared_pairs(target, comm, 1, PairingSide::departure).first[0].cluster_index == 0);
    CHECK(select_shared_pairs(target, comm, 1, PairingSide::arrival).first[0].cluster_index == 1);
}

TEST_CASE("decompose examples") {
    std::mt19937_64 rng(12);
    const CirTensor h1 = random_cir(rng), h2 = random_cir(rng);
    const std::vector<CirTensor> two{h1, h2};
    const auto d = decompose(two, SharingVector{{1, 0}});
    CHECK((d.shared.data() == h1.data()).all());
    CHECK((d.non_shared.data() == h2.data()).all());

    const auto all = decompose(two, SharingVector{{1, 1}});
    CHECK(all.non_shared.data().abs().maxCoeff() == 0.0);

    std::vector<CirTensor> twelve;
    for (int l = 0; l < 12; ++l)
        twelve.push_back(random_cir(rng));
    SharingVector s;
    std::bernoulli_distribution coin(0.5);
    for (int l = 0; l < 12; ++l)
        s.s.push_back(coin(rng));
    CirTensor direct = twelve[0];
    for (int l = 1; l < 12; ++l)
        for (Eigen::Index i = 0; i < direct.data().size(); ++i)
            direct.data()(i) += twelve[l].data()(i);
    const auto parts = decompose(twelve, s);
    CHECK(max_relative_error(direct, parts.shared + parts.non_shared) <= 1e-12);

    CHECK_THROWS_AS(decompose(two, SharingVector{{1}}), ConfigError);
    std::vector<CirTensor> mismatched{h1, CirTensor(1, 1, 1, 1)};
    CHECK_THROWS_AS(decompose(mismatched, SharingVector{{1, 0}}), ConfigError);
}

TEST_CASE("sharing_degree examples") {
    CHECK(sharing_degree(0.4, 1.0) == doctest::Approx(0.4));
    CHECK(sharing_degree(0.0, 2.0) == 0.0);
    CHECK(sharing_degree(2.0, 2.0) == 1.0);
    CHECK_THROWS_AS(sharing_degree(0.0, 0.0), DegenerateChannel);
}

TEST_CASE("shared_cluster_flags") {
    const std::vector<SharedPair> pairs{{0, 2, 0.0}, {3, 0, 0.0}};
    CHECK(shared_cluster_flags(pairs, 4) == std::vector<bool>{true, false, true, false});
    CHECK_THROWS_AS(shared_cluster_flags(pairs, 2), ConfigError);
}
