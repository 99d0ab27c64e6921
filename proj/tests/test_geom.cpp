#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "incidence/experiments.hpp"
#include "incidence/geom.hpp"
#include "incidence/rng.hpp"

using namespace incidence;
using geom::Circle;
using geom::Vec2;

TEST_CASE("pair metrics on direct substitutions") {
    const auto m1 = geom::pair_metrics(Circle({0, 0}, 1), Circle({3, 0}, 2));
    CHECK(m1.delta_tan == doctest::Approx(2.0));
    CHECK(m1.dist == doctest::Approx(4.0));

    const auto m2 = geom::pair_metrics(Circle({0, 0}, 1), Circle({0, 0}, 1));
    CHECK(m2.delta_tan == 0.0);
    CHECK(m2.dist == 0.0);

    const auto m3 = geom::pair_metrics(Circle({0, 0}, 1), Circle({1, 0}, 2));
    CHECK(m3.delta_tan == doctest::Approx(0.0));
    CHECK(m3.dist == doctest::Approx(2.0));
}

TEST_CASE("pair metrics symmetry and triangle bound") {
    CounterRng rng(7);
    for (int i = 0; i < 500; ++i) {
        Circle a({rng.next_range(-2, 2), rng.next_range(-2, 2)}, rng.next_range(0.1, 3.0));
        Circle b({rng.next_range(-2, 2), rng.next_range(-2, 2)}, rng.next_range(0.1, 3.0));
        const auto ab = geom::pair_metrics(a, b);
        const auto ba = geom::pair_metrics(b, a);
        CHECK(ab.delta_tan == ba.delta_tan);
        CHECK(ab.dist == ba.dist);
        CHECK(ab.delta_tan <= ab.dist + 1e-15);
    }
}

TEST_CASE("lattice pair metrics run on integers") {
    const auto a = geom::lattice_circle(0, 0, 3, 0.125);
    const auto b = geom::lattice_circle(3, 4, 8, 0.125);
    // (3,4,5): exactly tangent, so delta_tan must be exactly zero.
    const auto m = geom::pair_metrics(a, b);
    CHECK(m.delta_tan == 0.0);
    CHECK(m.dist == doctest::Approx(10.0 * 0.125));
    CHECK(geom::lattice_exact_tangent(a, b));
    CHECK_FALSE(geom::lattice_exact_tangent(a, geom::lattice_circle(3, 3, 8, 0.125)));
}

TEST_CASE("intersection bounds expressions") {
    const auto b1 = geom::intersection_bounds(Circle({0, 0}, 1), Circle({1, 0}, 2), 0.01);
    CHECK(b1.area_bound == doctest::Approx(1e-4 / std::sqrt(0.01 * 2.01)));
    CHECK(b1.diam_bound == doctest::Approx(std::sqrt(0.01 / 2.01)));

    const auto b2 = geom::intersection_bounds(Circle({0, 0}, 1), Circle({0, 0}, 1), 0.01);
    CHECK(b2.area_bound == doctest::Approx(0.01));

    // delta_tan = dist = 0.5 via centers 0.5 apart, equal radii.
    const auto b3 = geom::intersection_bounds(Circle({0, 0}, 1), Circle({0.5, 0}, 1), 0.01);
    CHECK(b3.area_bound == doctest::Approx(1e-4 / std::sqrt(0.51 * 0.51)));
}

TEST_CASE("delta tangency") {
    CHECK(geom::is_delta_tangent(Circle({0, 0}, 1), Circle({1, 0}, 2), 0.01));
    CHECK_FALSE(geom::is_delta_tangent(Circle({0, 0}, 1), Circle({5, 0}, 1), 0.01));
    // Externally touching pair: defect 0.005 in the outer branch.
    CHECK(geom::is_delta_tangent(Circle({0, 0}, 1), Circle({2.005, 0}, 1), 0.01));

    SUBCASE("monotone in delta") {
        CounterRng rng(11);
        for (int i = 0; i < 300; ++i) {
            Circle a({rng.next_range(-2, 2), rng.next_range(-2, 2)}, rng.next_range(0.2, 2.0));
            Circle b({rng.next_range(-2, 2), rng.next_range(-2, 2)}, rng.next_range(0.2, 2.0));
            const double d1 = rng.next_range(0.001, 0.2);
            const double d2 = d1 * rng.next_range(1.0, 8.0);
            if (geom::is_delta_tangent(a, b, d1)) CHECK(geom::is_delta_tangent(a, b, d2));
        }
    }
}

TEST_CASE("dyadic t convention: t/2 < d <= t") {
    CHECK(geom::dyadic_t(2.0) == 2.0);
    CHECK(geom::dyadic_t(1.5) == 2.0);
    CHECK(geom::dyadic_t(1.0) == 1.0);
    CHECK(geom::dyadic_t(0.6) == 1.0);
    CHECK(geom::dyadic_t(0.5) == 0.5);
}

namespace {

// Oracle: dense angular sampling of both delta-annuli; every point of the
// intersection must land inside a returned rectangle.
bool cover_oracle_holds(const Circle& c1, const Circle& c2, double delta,
                        const std::vector<geom::TangencyRectangle>& rects) {
    const int n = 4096;
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * M_PI * i / n;
        for (double rad_off : {-delta, -delta / 2, 0.0, delta / 2, delta}) {
            for (const Circle* base : {&c1, &c2}) {
                const Vec2 p = base->center + (base->radius + rad_off) * geom::unit_at(th);
                const bool in1 = std::abs(geom::norm(p - c1.center) - c1.radius) <= delta;
                const bool in2 = std::abs(geom::norm(p - c2.center) - c2.radius) <= delta;
                if (!(in1 && in2)) continue;
                bool covered = false;
                for (const auto& r : rects)
                    if (r.contains(p)) covered = true;
                if (!covered) return false;
            }
        }
    }
    return true;
}

} // namespace

TEST_CASE("cover: exact internal tangency gives one rectangle at the touch point") {
    const Circle c1({0, 0}, 1);
    const Circle c2({1.5, 0}, 2.5); // internal tangency at (-1, 0), d = 3
    REQUIRE(geom::pair_metrics(c1, c2).delta_tan == doctest::Approx(0.0));
    const auto rects = geom::cover_intersection_rectangles(c1, c2, 0.01);
    REQUIRE(rects.size() == 1);
    CHECK(std::abs(std::abs(rects[0].arc_center_angle) - M_PI) < 1e-9);
    CHECK(rects[0].t == 4.0);
    CHECK(cover_oracle_holds(c1, c2, 0.01, rects));
}

TEST_CASE("cover: identical circles are rejected") {
    CHECK_THROWS_AS(geom::cover_intersection_rectangles(Circle({0, 0}, 1), Circle({0, 0}, 1), 0.01),
                    std::domain_error);
}

TEST_CASE("cover: externally touching pair, rectangle centered toward the partner") {
    const double delta = 1.0 / 256;
    const Circle c1({0, 0}, 1);
    const Circle c2({1.5, 0}, 0.5 + delta / 2);
    const auto rects = geom::cover_intersection_rectangles(c1, c2, delta);
    REQUIRE(!rects.empty());
    CHECK(std::abs(rects[0].arc_center_angle) < 0.05);
    CHECK(cover_oracle_holds(c1, c2, delta, rects));
}

TEST_CASE("cover property: random delta-tangent pairs are fully covered") {
    CounterRng rng(2024);
    int tested = 0;
    while (tested < 1000) {
        const double delta = std::exp2(-rng.next_below(5) - 5.0);
        const double r1 = rng.next_range(0.3, 2.0);
        const double r2 = rng.next_range(0.3, 2.0);
        const Vec2 x1{rng.next_range(-1, 1), rng.next_range(-1, 1)};
        // Aim near a tangency of either branch, offset by up to delta.
        const double ang = rng.next_range(0.0, 2.0 * M_PI);
        const bool internal = rng.next_unit() < 0.5;
        const double target = internal ? std::abs(r1 - r2) : r1 + r2;
        const double dist = std::max(1e-6, target + rng.next_range(-delta, delta));
        const Circle c1(x1, r1);
        const Circle c2(x1 + dist * geom::unit_at(ang), r2);
        if (geom::tangency_defect(c1, c2) > delta) continue;
        if (geom::pair_metrics(c1, c2).dist < 4.0 * delta) continue; // skip degenerate scale
        std::vector<geom::TangencyRectangle> rects;
        try {
            rects = geom::cover_intersection_rectangles(c1, c2, delta);
        } catch (const std::domain_error&) {
            continue;
        }
        CHECK(rects.size() <= 2);
        REQUIRE(cover_oracle_holds(c1, c2, delta, rects));
        ++tested;
    }
}

namespace {

// Oracle: exhaustive containment search over candidate (a0*delta, t)
// rectangles on both base circles with a fine grid of arc centers.
bool comparable_oracle(const geom::TangencyRectangle& r1, const geom::TangencyRectangle& r2,
                       double a0) {
    auto rect_inside = [](const geom::TangencyRectangle& inner,
                          const geom::TangencyRectangle& outer) {
        const int n = 64;
        for (int i = 0; i <= n; ++i) {
            const double a = inner.arc_center_angle - inner.half_angle() +
                             2.0 * inner.half_angle() * i / n;
            const Vec2 p = inner.base.point_at(a);
            const Vec2 nrm = geom::unit_at(a);
            for (double off : {-inner.delta, 0.0, inner.delta})
                if (!outer.contains(p + off * nrm)) return false;
        }
        return true;
    };
    for (const auto& base_rect : {r1, r2}) {
        for (int k = -256; k <= 256; ++k) {
            geom::TangencyRectangle cand;
            cand.base = base_rect.base;
            cand.delta = a0 * std::min(r1.delta, r2.delta);
            cand.t = base_rect.t;
            cand.arc_center_angle = base_rect.arc_center_angle + k * (cand.arc_length() / 128.0);
            if (rect_inside(r1, cand) && rect_inside(r2, cand)) return true;
        }
    }
    return false;
}

geom::TangencyRectangle make_rect(const Circle& base, double angle, double delta, double t) {
    geom::TangencyRectangle r;
    r.base = base;
    r.arc_center_angle = angle;
    r.delta = delta;
    r.t = t;
    return r;
}

} // namespace

TEST_CASE("rectangle comparability") {
    const double delta = 1.0 / 512, t = 1.0;
    const Circle base({0, 0}, 1);
    const auto r1 = make_rect(base, 0.3, delta, t);

    SUBCASE("identity") { CHECK(geom::rectangles_comparable(r1, r1, 4.0)); }

    SUBCASE("same base, arc centers 10 arc-lengths apart") {
        const auto r2 = make_rect(base, 0.3 + 10.0 * std::sqrt(delta / t), delta, t);
        CHECK_FALSE(geom::rectangles_comparable(r1, r2, 2.0));
        CHECK_FALSE(comparable_oracle(r1, r2, 2.0));
    }

    SUBCASE("internally tangent bases, arcs at the tangency point") {
        // Tangency at angle 0 of both circles.
        const Circle other({0.5, 0}, 0.5);
        const auto ra = make_rect(base, 0.0, delta, t);
        const auto rb = make_rect(other, 0.0, delta, t);
        CHECK(geom::rectangles_comparable(ra, rb, 4.0));
        CHECK(comparable_oracle(ra, rb, 4.0));
    }

    SUBCASE("implementation agrees with the oracle away from the margin band") {
        CounterRng rng(55);
        int compared = 0;
        while (compared < 60) {
            const double off = rng.next_range(0.0, 4.0) * std::sqrt(delta / t);
            const auto r2 = make_rect(base, 0.3 + off, delta, t);
            const bool mine = geom::rectangles_comparable(r1, r2, 4.0);
            const bool oracle = comparable_oracle(r1, r2, 4.0);
            // Both tests are conservative in opposite directions near the
            // containment boundary; compare only clear-cut cases.
            const double window_arcs = off / std::sqrt(delta / t);
            if (window_arcs < 0.6) CHECK(mine == oracle);
            if (window_arcs > 1.4) CHECK_FALSE(mine);
            ++compared;
        }
    }
}

TEST_CASE("circle tangency to a rectangle") {
    const double delta = 1.0 / 512;
    const Circle base({0, 0}, 1);
    const auto r = make_rect(base, 1.0, delta, 1.0);

    CHECK(geom::circle_tangent_to_rectangle(base, r, 1.0));
    CHECK_FALSE(geom::circle_tangent_to_rectangle(Circle({0, 0}, 1.0 + 10 * 4 * delta), r, 4.0));

    // Internally tangent at the arc center with d(c, base) = 1.
    const Vec2 p = base.point_at(1.0);
    const double s = 0.5; // center on the inward normal: d = |r - s| * 2 = 1
    const Circle tangent_circle(p + (-s) * geom::unit_at(1.0), s);
    CHECK(geom::pair_metrics(tangent_circle, base).delta_tan == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(geom::circle_tangent_to_rectangle(tangent_circle, r, 4.0));
}

TEST_CASE("rotational curvature determinant closed forms") {
    using DF = geom::DefiningFunction;
    const DF sphere2(DF::Kind::Sphere, 2);
    CHECK(geom::rotational_curvature_det(sphere2, {0, 0}, {1, 0}) == doctest::Approx(-1.0));

    const DF plane2(DF::Kind::Plane, 2);
    CHECK(geom::rotational_curvature_det(plane2, {1, 0}, {1, 0}) == doctest::Approx(-1.0));
    CHECK(geom::rotational_curvature_det(plane2, {1, 0}, {1, 7}) == doctest::Approx(-1.0));

    SUBCASE("rejects off-surface and singular inputs") {
        CHECK_THROWS_AS(geom::rotational_curvature_det(sphere2, {0, 0}, {2, 0}), std::domain_error);
        CHECK_THROWS_AS(geom::rotational_curvature_det(sphere2, {1, 1}, {1, 1}), std::domain_error);
    }

    SUBCASE("matches central finite differences") {
        const DF sphere3(DF::Kind::Sphere, 3);
        const std::vector<double> x = {0.2, -0.1, 0.4};
        const std::vector<double> y = {0.2 + 1.0 / std::sqrt(3.0), -0.1 + 1.0 / std::sqrt(3.0),
                                       0.4 + 1.0 / std::sqrt(3.0)};
        const double cf = geom::rotational_curvature_det(sphere3, x, y);
        const double fd = experiments::fd_rotational_curvature_det(sphere3, x, y);
        CHECK(std::abs(cf - fd) / std::abs(cf) < 1e-4);
    }
}
