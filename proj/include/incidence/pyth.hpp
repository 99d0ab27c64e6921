#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace incidence::pyth {

// All arithmetic is 64-bit; c_max <= 2^20 keeps c^2 < 2^40.
inline constexpr int64_t kMaxC = int64_t{1} << 20;

struct NotPrimitive : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotATriple : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Integer solution of a^2 + b^2 = c^2 with b, c > 0 (a may be any sign).
struct PythTriple {
    int64_t a = 0;
    int64_t b = 1;
    int64_t c = 1;

    friend bool operator==(const PythTriple&, const PythTriple&) = default;
    friend auto operator<=>(const PythTriple& l, const PythTriple& r) {
        if (auto cmp = l.c <=> r.c; cmp != 0) return cmp;
        if (auto cmp = l.b <=> r.b; cmp != 0) return cmp;
        return l.a <=> r.a;
    }
};

// The three parametrization families, with alpha, beta odd positive,
// gcd(alpha, beta) = 1, and j >= 2 even where present:
//   HalfSquares:  a = (alpha^2 - beta^2)/2, b = alpha*beta,        c = (alpha^2 + beta^2)/2
//   PowerFirst:   a = 2^j alpha^2 - beta^2, b = 2^{(j+2)/2} ab,    c = 2^j alpha^2 + beta^2
//   PowerSecond:  a = alpha^2 - 2^j beta^2, b = 2^{(j+2)/2} ab,    c = alpha^2 + 2^j beta^2
struct TripleRepresentation {
    enum class Family { HalfSquares, PowerFirst, PowerSecond };
    Family family = Family::HalfSquares;
    int64_t alpha = 1;
    int64_t beta = 1;
    int j = 0; // meaningful only for the power families

    PythTriple reconstruct() const;

    friend bool operator==(const TripleRepresentation&, const TripleRepresentation&) = default;
};

int64_t isqrt64(int64_t n);

// All primitive triples (gcd(|a|,b,c) = 1, b,c > 0) with c <= c_max, sorted
// by (c, b, a). Throws std::logic_error if two parameter tuples ever build
// the same triple; uniqueness of the representation forbids it.
std::vector<PythTriple> enumerate_primitive_triples(int64_t c_max);

// Inverts the parametrization for a primitive triple. Throws NotATriple /
// NotPrimitive on bad input.
TripleRepresentation represent_triple(const PythTriple& t);

// Number of integer solutions to a^2 + b^2 = c^2 != 0 with |a|,|b|,|c| <= N
// and |c| >= c_min, all sign combinations counted. Computed by scaling the
// primitive enumeration; equals the cube brute force.
int64_t count_tangency_vectors(int64_t N, int64_t c_min = 0);

// O(N^2) oracle for the same count: walk (a, b), test for a perfect square.
int64_t count_tangency_vectors_brute(int64_t N, int64_t c_min = 0);

// Pairs (n, m) in [1, M]^2 with n, m odd and gcd(n, m) = 1.
int64_t coprime_odd_pairs(int64_t M);

} // namespace incidence::pyth
