#pragma once

#include <cstdint>
#include <vector>

namespace incidence {

// Counter-based generator: every draw is a pure function of (seed, stream,
// counter), so results never depend on call order, thread count, or any
// global state. Streams let independent tasks derive non-overlapping
// substreams from one user-facing seed.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t keyed_u64(uint64_t seed, uint64_t stream, uint64_t counter) {
    return mix64(mix64(seed ^ 0x6a09e667f3bcc909ULL) ^ mix64(stream) ^ counter * 0x2545f4914f6cdd1dULL);
}

// Uniform in [0, 1), 53-bit mantissa.
inline double keyed_unit(uint64_t seed, uint64_t stream, uint64_t counter) {
    return static_cast<double>(keyed_u64(seed, stream, counter) >> 11) * 0x1.0p-53;
}

class CounterRng {
  public:
    CounterRng(uint64_t seed, uint64_t stream = 0) : seed_(seed), stream_(stream) {}

    uint64_t next_u64() { return keyed_u64(seed_, stream_, counter_++); }
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), n > 0. Modulo bias is < 2^-53 for the
    // n used here; acceptable for shuffles and index draws.
    uint64_t next_below(uint64_t n) { return next_u64() % n; }

    double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

  private:
    uint64_t seed_;
    uint64_t stream_;
    uint64_t counter_ = 0;
};

// Fisher-Yates with the counter-based generator; deterministic per seed.
template <typename T>
void seeded_shuffle(std::vector<T>& v, CounterRng& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace incidence
