#include "incidence/pyth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace incidence::pyth {

int64_t isqrt64(int64_t n) {
    if (n < 0) throw std::invalid_argument("isqrt64: negative input");
    auto r = static_cast<int64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

PythTriple TripleRepresentation::reconstruct() const {
    const int64_t a2 = alpha * alpha, b2 = beta * beta;
    switch (family) {
        case Family::HalfSquares:
            return {(a2 - b2) / 2, alpha * beta, (a2 + b2) / 2};
        case Family::PowerFirst: {
            const int64_t p = int64_t{1} << j;
            return {p * a2 - b2, (int64_t{1} << ((j + 2) / 2)) * alpha * beta, p * a2 + b2};
        }
        case Family::PowerSecond: {
            const int64_t p = int64_t{1} << j;
            return {a2 - p * b2, (int64_t{1} << ((j + 2) / 2)) * alpha * beta, a2 + p * b2};
        }
    }
    throw std::logic_error("TripleRepresentation: bad family");
}

std::vector<PythTriple> enumerate_primitive_triples(int64_t c_max) {
    if (c_max < 1) throw std::invalid_argument("enumerate_primitive_triples: c_max must be >= 1");
    if (c_max > kMaxC) throw std::invalid_argument("enumerate_primitive_triples: c_max exceeds 2^20");

    std::vector<PythTriple> out;
    auto emit = [&](TripleRepresentation rep) { out.push_back(rep.reconstruct()); };

    for (int64_t alpha = 1; (alpha * alpha + 1) / 2 <= c_max; alpha += 2)
        for (int64_t beta = 1; (alpha * alpha + beta * beta) / 2 <= c_max; beta += 2)
            if (std::gcd(alpha, beta) == 1)
                emit({TripleRepresentation::Family::HalfSquares, alpha, beta, 0});

    for (int j = 2; (int64_t{1} << j) + 1 <= c_max; j += 2) {
        const int64_t p = int64_t{1} << j;
        for (int64_t alpha = 1; p * alpha * alpha + 1 <= c_max; alpha += 2)
            for (int64_t beta = 1; p * alpha * alpha + beta * beta <= c_max; beta += 2)
                if (std::gcd(alpha, beta) == 1)
                    emit({TripleRepresentation::Family::PowerFirst, alpha, beta, j});
        for (int64_t alpha = 1; alpha * alpha + p <= c_max; alpha += 2)
            for (int64_t beta = 1; alpha * alpha + p * beta * beta <= c_max; beta += 2)
                if (std::gcd(alpha, beta) == 1)
                    emit({TripleRepresentation::Family::PowerSecond, alpha, beta, j});
    }

    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end())
        throw std::logic_error("enumerate_primitive_triples: duplicate triple from distinct parameters");
    return out;
}

TripleRepresentation represent_triple(const PythTriple& t) {
    if (t.b <= 0 || t.c <= 0 || t.a * t.a + t.b * t.b != t.c * t.c)
        throw NotATriple("represent_triple: a^2 + b^2 != c^2 with b, c > 0");
    if (std::gcd(std::gcd(std::abs(t.a), t.b), t.c) != 1)
        throw NotPrimitive("represent_triple: gcd(|a|, b, c) != 1");

    TripleRepresentation rep;
    if (t.b % 2 != 0) {
        rep.family = TripleRepresentation::Family::HalfSquares;
        rep.alpha = isqrt64(t.c + t.a);
        rep.beta = isqrt64(t.c - t.a);
        rep.j = 0;
    } else {
        int v = 0;
        for (int64_t b = t.b; b % 2 == 0; b /= 2) ++v;
        rep.j = 2 * v - 2;
        if (rep.j < 2) throw NotATriple("represent_triple: even b with 2-adic valuation < 2");
        const int64_t p = int64_t{1} << rep.j;
        if ((t.a + t.c) % 4 == 0) {
            rep.family = TripleRepresentation::Family::PowerFirst;
            rep.alpha = isqrt64((t.a + t.c) / (2 * p));
            rep.beta = isqrt64((t.c - t.a) / 2);
        } else {
            rep.family = TripleRepresentation::Family::PowerSecond;
            rep.alpha = isqrt64((t.c + t.a) / 2);
            rep.beta = isqrt64((t.c - t.a) / (2 * p));
        }
    }
    if (!(rep.reconstruct() == t))
        throw std::logic_error("represent_triple: inversion failed to reproduce the triple");
    return rep;
}

int64_t count_tangency_vectors(int64_t N, int64_t c_min) {
    if (N < 1) throw std::invalid_argument("count_tangency_vectors: N must be >= 1");
    if (c_min < 0 || c_min > N) throw std::invalid_argument("count_tangency_vectors: need 0 <= c_min <= N");
    if (N > kMaxC) throw std::invalid_argument("count_tangency_vectors: N exceeds 2^20");

    int64_t count = 0;
    // Axis solutions (+-k, 0, +-k); the b > 0 normalization of the
    // parametrization lemma excludes them, so they are added explicitly.
    const int64_t k_lo = std::max<int64_t>(1, c_min);
    if (N >= k_lo) count += 4 * (N - k_lo + 1);

    // Every other solution is (a, s_b*b, s_c*c) for a unique primitive
    // (a, b, c) with b, c > 0 scaled by D = gcd: 4 sign variants each.
    for (const PythTriple& t : enumerate_primitive_triples(N)) {
        const int64_t d_hi = N / t.c;
        const int64_t d_lo = std::max<int64_t>(1, (c_min + t.c - 1) / t.c);
        if (d_hi >= d_lo) count += 4 * (d_hi - d_lo + 1);
    }
    return count;
}

int64_t count_tangency_vectors_brute(int64_t N, int64_t c_min) {
    if (N < 1) throw std::invalid_argument("count_tangency_vectors_brute: N must be >= 1");
    int64_t count = 0;
    for (int64_t a = -N; a <= N; ++a)
        for (int64_t b = -N; b <= N; ++b) {
            const int64_t cc = a * a + b * b;
            if (cc == 0) continue;
            const int64_t c = isqrt64(cc);
            if (c * c == cc && c <= N && c >= c_min) count += 2; // c = +-
        }
    return count;
}

int64_t coprime_odd_pairs(int64_t M) {
    if (M < 1) throw std::invalid_argument("coprime_odd_pairs: M must be >= 1");
    int64_t count = 0;
    for (int64_t n = 1; n <= M; n += 2)
        for (int64_t m = 1; m <= M; m += 2)
            if (std::gcd(n, m) == 1) ++count;
    return count;
}

} // namespace incidence::pyth
