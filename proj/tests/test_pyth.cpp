#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <set>

#include "incidence/pyth.hpp"

using namespace incidence::pyth;

namespace {

// Oracle: exhaustive loop with gcd filter over |a|, b, c <= c_max.
std::set<std::tuple<int64_t, int64_t, int64_t>> primitive_oracle(int64_t c_max) {
    std::set<std::tuple<int64_t, int64_t, int64_t>> out;
    for (int64_t c = 1; c <= c_max; ++c)
        for (int64_t b = 1; b <= c; ++b)
            for (int64_t a = -c; a <= c; ++a) {
                if (a * a + b * b != c * c) continue;
                if (std::gcd(std::gcd(std::abs(a), b), c) != 1) continue;
                out.insert({a, b, c});
            }
    return out;
}

} // namespace

TEST_CASE("primitive enumeration matches the stated small sets") {
    const auto t1 = enumerate_primitive_triples(1);
    REQUIRE(t1.size() == 1);
    CHECK(t1[0] == PythTriple{0, 1, 1});

    const auto t5 = enumerate_primitive_triples(5);
    std::set<std::tuple<int64_t, int64_t, int64_t>> got;
    for (const auto& t : t5) got.insert({t.a, t.b, t.c});
    const std::set<std::tuple<int64_t, int64_t, int64_t>> want = {
        {0, 1, 1}, {-4, 3, 5}, {-3, 4, 5}, {3, 4, 5}, {4, 3, 5}};
    CHECK(got == want);
}

TEST_CASE("primitive enumeration equals the exhaustive oracle up to 1000") {
    const auto triples = enumerate_primitive_triples(1000);
    std::set<std::tuple<int64_t, int64_t, int64_t>> got;
    for (const auto& t : triples) got.insert({t.a, t.b, t.c});
    CHECK(got == primitive_oracle(1000));
}

TEST_CASE("representation inversion") {
    const auto r1 = represent_triple({4, 3, 5});
    CHECK(r1.family == TripleRepresentation::Family::HalfSquares);
    CHECK(r1.alpha == 3);
    CHECK(r1.beta == 1);

    const auto r2 = represent_triple({3, 4, 5});
    CHECK(r2.family == TripleRepresentation::Family::PowerFirst);
    CHECK(r2.j == 2);
    CHECK(r2.alpha == 1);
    CHECK(r2.beta == 1);

    const auto r3 = represent_triple({0, 1, 1});
    CHECK(r3.family == TripleRepresentation::Family::HalfSquares);
    CHECK(r3.alpha == 1);
    CHECK(r3.beta == 1);

    CHECK_THROWS_AS(represent_triple({6, 8, 10}), NotPrimitive);
    CHECK_THROWS_AS(represent_triple({1, 2, 3}), NotATriple);
    CHECK_THROWS_AS(represent_triple({3, 4, -5}), NotATriple);
}

TEST_CASE("representation round trip and uniqueness to 2000") {
    // enumerate_primitive_triples asserts uniqueness internally.
    const auto triples = enumerate_primitive_triples(2000);
    for (const auto& t : triples) {
        const auto rep = represent_triple(t);
        CHECK(rep.reconstruct() == t);
        CHECK(rep.alpha % 2 == 1);
        CHECK(rep.beta % 2 == 1);
        CHECK(std::gcd(rep.alpha, rep.beta) == 1);
    }
}

TEST_CASE("tangency vector counts: stated values") {
    CHECK(count_tangency_vectors(1, 0) == 8);
    CHECK(count_tangency_vectors(5, 0) == 56);
    // |c| >= 3 drops the 16 axis-type solutions with |c| <= 2.
    CHECK(count_tangency_vectors_brute(5, 3) == 40);
    CHECK(count_tangency_vectors(5, 3) == 40);
}

TEST_CASE("tangency vector counts match the cube oracle") {
    for (int64_t n : {1, 2, 3, 4, 5, 6, 7, 8, 13, 25, 50, 100, 200, 300}) {
        CHECK(count_tangency_vectors(n, 0) == count_tangency_vectors_brute(n, 0));
        CHECK(count_tangency_vectors(n, n / 2) == count_tangency_vectors_brute(n, n / 2));
    }
}

TEST_CASE("restricted count keeps a linear floor") {
    // "At least k2 N" with the restriction c > N/2; sanity-check growth.
    for (int64_t n : {256, 512, 1024}) {
        const int64_t restricted = count_tangency_vectors(n, n / 2);
        CHECK(restricted >= n); // the axis solutions alone give 2N of them
    }
}

TEST_CASE("coprime odd pairs") {
    CHECK(coprime_odd_pairs(1) == 1);
    CHECK(coprime_odd_pairs(5) == 7);

    // Exhaustive scan at M = 100 with the quadratic lower bound.
    int64_t oracle = 0;
    for (int64_t n = 1; n <= 100; n += 2)
        for (int64_t m = 1; m <= 100; m += 2)
            if (std::gcd(n, m) == 1) ++oracle;
    CHECK(coprime_odd_pairs(100) == oracle);
    const double ratio = static_cast<double>(oracle) / (100.0 * 100.0);
    // Density of coprime odd pairs is 2/pi^2 ~ 0.2026.
    CHECK(ratio > 0.15);
    CHECK(ratio < 0.30);

    for (int64_t m = 8; m <= 256; m *= 2)
        CHECK(coprime_odd_pairs(m) >= static_cast<int64_t>(0.19 * static_cast<double>(m * m)));
}
