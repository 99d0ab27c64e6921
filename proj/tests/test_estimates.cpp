#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "incidence/estimates.hpp"

using namespace incidence;
using probab::RegionSpec;

TEST_CASE("focusing input: the center of the annulus sees full mass") {
    const double delta = 1.0 / 64;
    const auto E = estimates::focusing_example(delta);
    // At the origin the whole shell lies inside E, so the value is exactly
    // the total quadrature mass; F(1 - 1e-9) nonempty pins that mass to 1
    // within 1e-9.
    const auto r = estimates::circular_average_levelset(E, delta, 0.5, delta / 2.0, 2);
    CHECK(r.measure_F > 0.0);
    CHECK(r.measure_E == doctest::Approx(4.0 * M_PI * delta).epsilon(0.1));
    CHECK(r.ratio > 0.0);

    const auto top = estimates::circular_average_levelset(E, delta, 1.0 - 1e-9, delta / 2.0, 2);
    CHECK(top.measure_F > 0.0);
}

TEST_CASE("empty E is rejected") {
    const auto tiny = RegionSpec::ball({50.0, 50.0}, 1e-9);
    CHECK_THROWS_AS(estimates::circular_average_levelset(tiny, 1.0 / 32, 0.5, 1.0 / 64, 2),
                    estimates::EmptyE);
}

TEST_CASE("level sets are nested across lambda") {
    const double delta = 1.0 / 32;
    const auto E = estimates::scaling_example(delta);
    std::vector<double> lambdas;
    for (int k = 1; k <= 10; ++k) lambdas.push_back(std::exp2(-k));
    const auto sweep = estimates::circular_levelset_sweep(E, delta, delta / 2.0, 2, lambdas);
    for (size_t i = 1; i < sweep.size(); ++i) CHECK(sweep[i].measure_F >= sweep[i - 1].measure_F);
}

TEST_CASE("grid refinement stability at delta = 2^-6") {
    const double delta = 1.0 / 64;
    for (int which = 0; which < 3; ++which) {
        const RegionSpec E = which == 0   ? estimates::focusing_example(delta)
                             : which == 1 ? estimates::knapp_example(delta)
                                          : estimates::scaling_example(delta);
        const double lam = 1.0 / 16;
        const auto coarse = estimates::circular_average_levelset(E, delta, lam, delta / 2.0, 2);
        const auto fine = estimates::circular_average_levelset(E, delta, lam, delta / 4.0, 2);
        if (coarse.measure_F > 0.0)
            CHECK(std::abs(fine.measure_F - coarse.measure_F) / coarse.measure_F < 0.2);
    }
}

TEST_CASE("scaling example stays uniformly bounded over lambda") {
    for (double delta : {1.0 / 32, 1.0 / 64}) {
        const auto E = estimates::scaling_example(delta);
        std::vector<double> lambdas;
        for (int k = 1; k <= 12; ++k) lambdas.push_back(std::exp2(-k));
        const auto sweep = estimates::circular_levelset_sweep(E, delta, delta / 2.0, 2, lambdas);
        for (const auto& r : sweep) CHECK(r.ratio <= 0.02);
    }
}

TEST_CASE("full box under the cone average") {
    // Circles of radius >= 1 cannot average 1/2 over a unit box, so
    // F(1/2) is empty; the level sets fill in from lambda ~ 1/8 down.
    const double delta = 1.0 / 32;
    const auto E = RegionSpec::box({0, 0}, {1, 1});
    const auto high = estimates::cone_average_levelset(E, delta, 0.5, delta / 2.0);
    CHECK(high.measure_F == 0.0);
    const auto mid = estimates::cone_average_levelset(E, delta, 1.0 / 8, delta / 2.0);
    CHECK(mid.measure_F > 0.0);
    CHECK(mid.ratio < 0.5);
}

TEST_CASE("cone knapp input peaks near lambda = sqrt(delta)") {
    const double delta = 1.0 / 64;
    const auto E = estimates::knapp_example(delta);
    std::vector<double> lambdas;
    for (int k = 1; k <= 12; ++k) lambdas.push_back(std::exp2(-k));
    const auto sweep = estimates::cone_levelset_sweep(E, delta, delta / 2.0, lambdas);
    double best_ratio = 0.0, best_lambda = 0.0;
    for (const auto& r : sweep)
        if (r.ratio > best_ratio) {
            best_ratio = r.ratio;
            best_lambda = r.lambda;
        }
    CHECK(best_ratio > 0.04);
    CHECK(best_ratio < 0.4);
    // The hugging circles average sqrt(delta)/(2 pi t) of their mass over E,
    // so the maximizing level is sqrt(delta) up to that constant.
    CHECK(best_lambda >= std::sqrt(delta) / 16.0);
    CHECK(best_lambda <= std::sqrt(delta));
}

TEST_CASE("dimension three scaling example") {
    const double delta = 1.0 / 16;
    const auto E = RegionSpec::ball({1.0, 0.0, 0.0}, delta);
    std::vector<double> lambdas;
    for (int k = 1; k <= 10; ++k) lambdas.push_back(std::exp2(-k));
    const auto sweep = estimates::circular_levelset_sweep(E, delta, delta / 2.0, 3, lambdas);
    for (const auto& r : sweep) {
        CHECK(r.measure_E > 0.0);
        CHECK(r.ratio < 0.05); // lambda^4 |F| / |E|^3 stays bounded
    }
}
