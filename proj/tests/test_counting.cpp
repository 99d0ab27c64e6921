#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "incidence/counting.hpp"
#include "incidence/families.hpp"
#include "incidence/rng.hpp"

using namespace incidence;
using counting::Window2;
using families::CircleFamily;
using geom::Circle;

namespace {

CircleFamily custom_family(std::vector<Circle> circles, double delta) {
    CircleFamily fam;
    fam.circles = std::move(circles);
    fam.delta = delta;
    fam.kind = families::FamilyKind::Custom;
    return fam;
}

CircleFamily random_family(uint64_t seed, size_t n, double delta) {
    CounterRng rng(seed);
    std::vector<Circle> cs;
    cs.reserve(n);
    for (size_t i = 0; i < n; ++i)
        cs.push_back(Circle({rng.next_range(0, 1), rng.next_range(0, 1)}, rng.next_range(0.5, 1.0)));
    return custom_family(std::move(cs), delta);
}

} // namespace

TEST_CASE("exact tangent pairs") {
    const auto two = custom_family({Circle({0, 0}, 1), Circle({3, 4}, 6)}, 0.1);
    CHECK(counting::count_exact_tangent_pairs(two, 1e-12) == 1);
    CHECK_THROWS_AS(counting::count_exact_tangent_pairs(two), counting::ToleranceRequired);

    CHECK(counting::count_exact_tangent_pairs(families::lattice_family(2)) == 8);
    CHECK(counting::count_exact_tangent_pairs_brute(families::lattice_family(2)) == 8);

    const auto f16 = families::lattice_family(16);
    CHECK(counting::count_exact_tangent_pairs(f16) ==
          counting::count_exact_tangent_pairs_brute(f16));

    SUBCASE("invariant under permutation") {
        auto fam = families::lattice_family(8);
        const auto base = counting::count_exact_tangent_pairs(fam);
        CounterRng rng(17);
        seeded_shuffle(fam.circles, rng);
        CHECK(counting::count_exact_tangent_pairs(fam) == base);
    }
}

TEST_CASE("delta tangent pairs") {
    const auto pair = custom_family({Circle({0, 0}, 1), Circle({1, 0}, 2)}, 0.01);
    CHECK(counting::count_delta_tangent_pairs(pair, 0.5, 1.0, 4.0) == 1);
    CHECK(counting::count_delta_tangent_pairs(pair, 0.5, 3.0, 4.0) == 0);

    const auto f16 = families::lattice_family(16);
    CHECK(counting::count_delta_tangent_pairs(f16, 0.01, 0.5, 2.0) ==
          counting::count_delta_tangent_pairs_brute(f16, 0.01, 0.5, 2.0));
}

TEST_CASE("hash counters equal brute force on random families") {
    for (uint64_t seed = 1; seed <= 12; ++seed) {
        const size_t n = 100 + 137 * seed;
        auto fam = random_family(seed, n, 0.02);
        CHECK(counting::count_delta_tangent_pairs(fam, 1.0, 0.0, 4.0) ==
              counting::count_delta_tangent_pairs_brute(fam, 1.0, 0.0, 4.0));
        CHECK(counting::count_delta_tangent_pairs(fam, 0.3, 0.5, 2.0) ==
              counting::count_delta_tangent_pairs_brute(fam, 0.3, 0.5, 2.0));
    }
}

TEST_CASE("multiplicity grid") {
    SUBCASE("single circle: exact membership per point") {
        const auto fam = custom_family({Circle({0.5, 0.5}, 0.3)}, 0.02);
        const auto grid =
            counting::multiplicity_grid(fam, 0.02, 0.01, Window2{{0, 0}, {1, 1}});
        for (int iy = 0; iy < grid.ny; ++iy)
            for (int ix = 0; ix < grid.nx; ++ix) {
                const auto p = grid.point(ix, iy);
                const bool in =
                    std::abs(geom::norm(p - geom::Vec2{0.5, 0.5}) - 0.3) <= 0.02;
                CHECK(grid.at(ix, iy) == (in ? 1u : 0u));
            }
    }

    SUBCASE("knapp family covers the origin with full multiplicity") {
        const double delta = 1.0 / 64;
        const auto fam = families::knapp_family(delta);
        const auto grid = counting::multiplicity_grid(fam, delta, delta / 2.0,
                                                      Window2{{-0.004, -0.004}, {0.004, 0.004}});
        // The sample at the origin lies inside every annulus.
        CHECK(grid.max_count() == fam.size());
    }

    SUBCASE("two disjoint annuli never overlap") {
        const auto fam = custom_family({Circle({0.2, 0.2}, 0.1), Circle({0.8, 0.8}, 0.1)}, 0.01);
        const auto grid = counting::multiplicity_grid(fam, 0.01, 0.005, Window2{{0, 0}, {1, 1}});
        CHECK(grid.max_count() == 1);
    }

    SUBCASE("pointwise monotone in delta") {
        const auto fam = random_family(5, 40, 0.05);
        const auto g1 = counting::multiplicity_grid(fam, 0.04, 0.01, Window2{{0, 0}, {1, 1}});
        const auto g2 = counting::multiplicity_grid(fam, 0.08, 0.01, Window2{{0, 0}, {1, 1}});
        for (size_t i = 0; i < g1.counts.size(); ++i) CHECK(g1.counts[i] <= g2.counts[i]);
    }
}

TEST_CASE("high multiplicity fraction") {
    const Circle c({0.5, 0.5}, 0.4);

    SUBCASE("alone: nothing exceeds 1.5") {
        const auto fam = custom_family({c}, 0.01);
        CHECK(counting::high_multiplicity_fraction(c, fam, 0.01, 1.5) == 0.0);
    }

    SUBCASE("k duplicated annuli exceed k - 1/2 everywhere") {
        const auto fam = custom_family({c, c, c, c}, 0.01);
        CHECK(counting::high_multiplicity_fraction(c, fam, 0.01, 3.5) == 1.0);
    }

    SUBCASE("knapp mass concentrates on a sqrt(delta) arc") {
        const double delta = 1.0 / 64;
        const auto fam = families::knapp_family(delta);
        const double lam = std::sqrt(delta);
        const auto probe = fam.circles[fam.circles.size() / 2];
        const double frac = counting::high_multiplicity_fraction(
            probe, fam, delta, 0.5 * static_cast<double>(fam.size()));
        CHECK(frac >= lam / 8.0);
        CHECK(frac <= 8.0 * lam);
    }
}

TEST_CASE("wolff bound expression") {
    CHECK(counting::wolff_bound(1, 1, 1, 1, 0.0, 1.0) == doctest::Approx(3.0));
    CHECK(counting::wolff_bound(16, 16, 1, 1, 0.0, 1.0) == doctest::Approx(96.0));
    for (int64_t k : {2, 7, 40}) CHECK(counting::wolff_bound(k, k, k, k, 0.0, 1.0) == doctest::Approx(3.0));
    CHECK_THROWS_AS(counting::wolff_bound(0, 1, 1, 1, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("type rectangles") {
    SUBCASE("one tangent cross pair gives one (1,1) rectangle") {
        const auto W = custom_family({Circle({0, 0}, 1)}, 0.01);
        const auto B = custom_family({Circle({1.5, 0}, 0.5)}, 0.01);
        const auto recs = counting::type_rectangles(W, B, 2.0, 0.01);
        REQUIRE(recs.size() == 1);
        CHECK(recs[0].mu == 1);
        CHECK(recs[0].nu == 1);
        CHECK(recs[0].rectangle.t == doctest::Approx(2.0));
        CHECK(std::abs(recs[0].rectangle.arc_center_angle) < 1e-9);
    }

    SUBCASE("far families give nothing") {
        const auto W = custom_family({Circle({0, 0}, 1)}, 0.01);
        const auto B = custom_family({Circle({9, 0}, 1)}, 0.01);
        CHECK(counting::type_rectangles(W, B, 2.0, 0.01).empty());
    }

    SUBCASE("sub-knapp split: output incomparable, every tangent pair served") {
        const double delta = 1.0 / 64;
        const auto full = families::knapp_family(delta);
        CircleFamily W = custom_family({}, delta), B = custom_family({}, delta);
        for (const auto& c : full.circles) {
            if (c.radius < 1.25)
                W.circles.push_back(c);
            else if (c.radius > 1.75)
                B.circles.push_back(c);
        }
        const auto recs = counting::type_rectangles(W, B, 1.0, delta);
        REQUIRE(!recs.empty());

        // pairwise incomparable within each t level
        for (size_t i = 0; i < recs.size(); ++i)
            for (size_t j = i + 1; j < recs.size(); ++j)
                if (recs[i].rectangle.t == recs[j].rectangle.t)
                    CHECK_FALSE(geom::rectangles_comparable(recs[i].rectangle, recs[j].rectangle));

        // the common point forces one rectangle seeing most of both sides
        uint32_t best_mu = 0, best_nu = 0;
        for (const auto& r : recs) {
            best_mu = std::max(best_mu, r.mu);
            best_nu = std::max(best_nu, r.nu);
        }
        CHECK(best_mu >= W.size() / 2);
        CHECK(best_nu >= B.size() / 2);

        // every delta-tangent cross pair is tangent to some output rectangle
        int failures = 0;
        for (const auto& w : W.circles)
            for (const auto& b : B.circles) {
                if (!geom::is_delta_tangent(w, b, delta)) continue;
                bool served = false;
                for (const auto& r : recs)
                    if (geom::circle_tangent_to_rectangle(w, r.rectangle) &&
                        geom::circle_tangent_to_rectangle(b, r.rectangle))
                        served = true;
                failures += served ? 0 : 1;
            }
        CHECK(failures == 0);
    }
}

TEST_CASE("neighborhood intersection count") {
    // c1, c2 internally tangent with tau = 0.25; the member below sits in
    // the eps band of both with distances inside the same dyadic t = 1:
    // nested against c1 (defect 0.03) and crossing c2 (defect ~0.029).
    const Circle c1({0, 0}, 1);
    const Circle c2({0.125, 0}, 0.875);
    const double eps = 0.04;

    SUBCASE("a single member in both neighborhoods") {
        const Circle c3(0.35 * geom::unit_at(0.85), 0.62);
        const auto fam = custom_family({c3}, eps / 2.0);
        const auto out = counting::neighborhood_intersection_count(fam, c1, c2, eps, 1.0);
        CHECK(out.count == 1);
        CHECK(out.bound > 0.0);
    }

    SUBCASE("empty family") {
        const auto fam = custom_family({}, eps / 2.0);
        CHECK(counting::neighborhood_intersection_count(fam, c1, c2, eps, 1.0).count == 0);
    }
}

TEST_CASE("mu-fold points") {
    SUBCASE("three circles tangent at one point on one line") {
        CircleFamily fam;
        fam.delta = 1.0;
        fam.kind = families::FamilyKind::Lattice;
        fam.circles = {geom::lattice_circle(0, 0, 1, 1.0), geom::lattice_circle(1, 0, 2, 1.0),
                       geom::lattice_circle(2, 0, 3, 1.0)};
        CHECK(counting::mu_fold_points(fam, 3) == 1);
        CHECK(counting::mu_fold_points(fam, 1) == 1);
        CHECK(counting::mu_fold_points(fam, 31) == 0);
    }

    SUBCASE("no tangencies, no points") {
        CircleFamily fam;
        fam.delta = 0.5;
        fam.kind = families::FamilyKind::Lattice;
        fam.circles = {geom::lattice_circle(0, 0, 1, 0.5), geom::lattice_circle(1, 1, 1, 0.5)};
        CHECK(counting::mu_fold_points(fam, 1) == 0);
    }

    SUBCASE("non-lattice input is rejected") {
        const auto fam = custom_family({Circle({0, 0}, 1)}, 0.1);
        CHECK_THROWS_AS(counting::mu_fold_points(fam, 1), std::invalid_argument);
    }
}

TEST_CASE("three circle set volume") {
    const double eps = 1.0 / 1024, t = 0.5, lam = 0.25;

    SUBCASE("far circles leave an empty set") {
        const auto v = counting::three_circle_set_volume(
            Circle({0, 0}, 1), Circle({20, 0}, 1), Circle({0, 20}, 1), eps, t, lam, 20000, 5);
        CHECK(v.estimate == 0.0);
        CHECK(v.bound == doctest::Approx(eps * eps * eps / (lam * lam * lam)));
    }

    SUBCASE("degenerate and invalid inputs") {
        const Circle c({0, 0}, 1);
        CHECK_THROWS_AS(
            counting::three_circle_set_volume(c, c, Circle({1, 0}, 1), eps, t, lam, 20000, 5),
            std::invalid_argument);
        CHECK_THROWS_AS(counting::three_circle_set_volume(c, Circle({1, 0}, 1), Circle({0, 1}, 1),
                                                          0.25, t, lam, 20000, 5),
                        counting::HypothesisViolated);
    }
}

TEST_CASE("bucketed pair counts sum to the total") {
    const auto fam = random_family(9, 300, 0.02);
    const auto buckets = counting::bucketed_pair_counts(fam);
    CHECK(buckets.total == 300 * 299 / 2);
    int64_t sum = 0;
    for (const auto& [key, v] : buckets.counts) sum += v;
    CHECK(sum == buckets.total);
}
