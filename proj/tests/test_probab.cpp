#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "incidence/probab.hpp"

using namespace incidence;
using probab::RegionSpec;

TEST_CASE("binomial tail: exact small cases") {
    // P[sum <= 2] for Bin(10, 1/2) = (1 + 10 + 45)/1024.
    CHECK(probab::binomial_tail(10, 0.5, 0.5).probability == doctest::Approx(56.0 / 1024).epsilon(1e-10));
    CHECK(probab::binomial_tail(7, 0.0, 0.5).probability == 0.0);
    CHECK(probab::binomial_tail(200, 0.0, 0.25).probability == 0.0);

    // Exact vs the closed-form bound at a spot value.
    const double tail = probab::binomial_tail(100, 0.3, 0.5).probability;
    double direct = 0.0;
    double logc = 0.0; // log C(100, k) built incrementally
    for (int k = 0; k < 15; ++k) {
        if (k > 0) logc += std::log((100.0 - k + 1) / k);
        direct += std::exp(logc + k * std::log(0.3) + (100 - k) * std::log(0.7));
    }
    CHECK(tail == doctest::Approx(direct).epsilon(1e-9));
    CHECK(tail <= probab::binomial_tail_bound(100, 0.3, 0.5));
}

TEST_CASE("binomial tail: monotone in alpha, complement identity") {
    for (int64_t N : {3, 17, 50}) {
        for (double p : {0.05, 0.25, 0.5}) {
            double prev = -1.0;
            for (double alpha : {0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 1.0}) {
                const double v = probab::binomial_tail(N, p, alpha).probability;
                CHECK(v >= prev - 1e-12);
                prev = v;
            }
            // P[sum < k] + P[sum >= k] = 1 with k = N (alpha = 1/p scaled):
            // direct complement at the largest cut we can express: alpha = 1
            // gives P[sum < N p]; complement computed by summing the rest.
            const double below = probab::binomial_tail(N, p, 1.0).probability;
            double above = 0.0;
            for (int64_t k = static_cast<int64_t>(std::ceil(N * p - 1e-12)); k <= N; ++k) {
                double logc = 0.0;
                for (int64_t i = 1; i <= k; ++i) logc += std::log((N - i + 1.0) / i);
                above += std::exp(logc + k * std::log(p) + (N - k) * std::log1p(-p));
            }
            CHECK(below + above == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("chernoff grid holds with zero violations") {
    // The acceptance suite runs the full grid; spot-check a sub-grid here.
    for (int64_t N : {1, 2, 5, 20, 77, 200})
        for (double p : {0.05, 0.2, 0.35, 0.5})
            for (double alpha : {0.1, 0.25, 0.5}) {
                const auto tail = probab::binomial_tail(N, p, alpha);
                CHECK(tail.within_hypothesis);
                CHECK(tail.probability <= probab::binomial_tail_bound(N, p, alpha) + 1e-15);
            }
}

TEST_CASE("simplex volume") {
    CHECK(probab::simplex_volume({{0, 0}, {1, 0}, {0, 1}}) == doctest::Approx(0.5));
    CHECK(probab::simplex_volume({{0, 0}, {1, 1}, {2, 2}}) == doctest::Approx(0.0));
    CHECK(probab::simplex_volume({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}) ==
          doctest::Approx(1.0 / 6));
    CHECK_THROWS_AS(probab::simplex_volume({{0, 0}, {1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(probab::simplex_volume({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}),
                    std::invalid_argument);
}

TEST_CASE("region specs") {
    const auto disk = RegionSpec::ball({0, 0}, 1);
    CHECK(disk.volume() == doctest::Approx(M_PI));
    CHECK(disk.contains({0.5, 0.5}));
    CHECK_FALSE(disk.contains({0.9, 0.9}));

    const auto box = RegionSpec::box({0, 0, 0}, {2, 1, 0.5});
    CHECK(box.volume() == doctest::Approx(1.0));

    CHECK_THROWS_AS(RegionSpec::union_of_balls({{0, 0}, {1, 0}}, 0.6), std::invalid_argument);
    const auto frag = RegionSpec::union_of_balls({{0, 0}, {3, 0}}, 1.0);
    CHECK(frag.volume() == doctest::Approx(2 * M_PI));

    SUBCASE("sampling lands inside and spreads over components") {
        CounterRng rng(12);
        int left = 0;
        for (int i = 0; i < 4000; ++i) {
            const auto p = frag.sample(rng);
            CHECK(frag.contains(p));
            if (p[0] < 1.5) ++left;
        }
        CHECK(left > 1500);
        CHECK(left < 2500);
    }
}

TEST_CASE("simplex probability edges") {
    const auto disk = RegionSpec::ball({0, 0}, 1);

    // eps beyond the largest inscribed triangle: every trial hits.
    const auto all = probab::simplex_probability(disk, 3, 2.0, 10000, 5);
    CHECK(all.estimate == 1.0);

    const auto none = probab::simplex_probability(disk, 3, 0.0, 10000, 5);
    CHECK(none.estimate == 0.0);

    CHECK_THROWS_AS(probab::simplex_probability(disk, 4, 0.1, 10000, 5), std::invalid_argument);
    CHECK_THROWS_AS(probab::simplex_probability(disk, 3, 0.1, 10, 5), std::invalid_argument);
}

TEST_CASE("simplex probability scales linearly in eps (coarse)") {
    const auto disk = RegionSpec::ball({0, 0}, 1);
    const auto p1 = probab::simplex_probability(disk, 3, 0.01, 200000, 77);
    const auto p4 = probab::simplex_probability(disk, 3, 0.04, 200000, 78);
    const double ratio = p4.estimate / p1.estimate;
    CHECK(ratio > 2.5);
    CHECK(ratio < 5.5);
}

TEST_CASE("min-perturbed bound is certified") {
    CounterRng rng(31);
    const auto disk = RegionSpec::ball({0, 0}, 1);
    const double tau = 0.01;
    int checked = 0;
    while (checked < 200) {
        std::vector<std::vector<double>> pts(3);
        for (auto& p : pts) p = disk.sample(rng);
        const double lb = probab::min_perturbed_volume_bound(pts, tau);
        // random perturbations can never undercut the certified bound
        for (int k = 0; k < 20; ++k) {
            auto moved = pts;
            for (auto& p : moved)
                for (auto& c : p) c += rng.next_range(-tau / std::sqrt(2.0), tau / std::sqrt(2.0));
            CHECK(probab::simplex_volume(moved) >= lb - 1e-12);
        }
        ++checked;
    }
}

TEST_CASE("min-perturbed mode reports a positive success floor") {
    const auto disk = RegionSpec::ball({0, 0}, 1);
    probab::SimplexMode mode;
    mode.min_perturbed = true;
    mode.delta = 0.02;
    mode.c0 = 0.01; // conservative measured constant
    const auto est = probab::simplex_probability(disk, 3, 0.0, 50000, 9, mode);
    CHECK(est.floor_bound == doctest::Approx(6.0 / (12.0 * 12.0 * 12.0)));
    CHECK(est.estimate > est.floor_bound);
}
