#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "incidence/geom.hpp"

namespace incidence::families {

using geom::Circle;
using geom::Vec2;

struct NoValidSplit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Axis-aligned region in (center_x, center_y, radius) space.
struct Box3 {
    double x_lo = 0.0, x_hi = 1.0;
    double y_lo = 0.0, y_hi = 1.0;
    double r_lo = 0.5, r_hi = 1.0;

    double span_x() const { return x_hi - x_lo; }
    double span_y() const { return y_hi - y_lo; }
    double span_r() const { return r_hi - r_lo; }
};

inline Box3 unit_box() { return {}; }

enum class FamilyKind { Lattice, DeltaNet, RadiiSeparatedNet, Knapp, Thinned, Custom };

enum class NetMode { FullSeparation, RadiiSeparation };

struct CircleFamily {
    std::vector<Circle> circles;
    double delta = 0.0;
    FamilyKind kind = FamilyKind::Custom;
    Box3 box;
    std::optional<uint64_t> seed;

    size_t size() const { return circles.size(); }
};

// d-metric distance of two points of (center, radius) space.
inline double circle_space_dist(const Circle& a, const Circle& b) {
    return geom::pair_metrics(a, b).dist;
}

// The rescaled lattice: C(j*delta, k*delta, l*delta) with 1 <= j,k <= N,
// ceil(N/2) <= l <= N, delta = 1/N. Exact integer coords are carried.
CircleFamily lattice_family(int64_t N);

// Greedy maximal net over a seeded shuffle of the half-spacing candidate
// grid. FullSeparation keeps pairwise d > delta; RadiiSeparation separates
// only the radii (>= delta) and draws centers uniformly in the box.
CircleFamily delta_net_family(double delta, const Box3& box, NetMode mode, uint64_t seed);

// Circles through the origin, x = r (cos th, sin th), r on a delta-grid of
// [1,2] and th on a delta-grid of [0, sqrt(delta)]: ~delta^{-3/2} circles
// packed in a 1 x delta x sqrt(delta) slab of (center, radius) space.
CircleFamily knapp_family(double delta);

// One circle per cell of a (5/4)delta-spaced partition of the box, jittered
// by up to delta/16 per coordinate: a delta-separated family, maximal up to
// a bounded factor, with O(1) memory per kept circle. Stands in for the
// greedy net when delta^{-3} is too large to materialize.
CircleFamily cell_net_family(double delta, const Box3& box, uint64_t seed);

// Bernoulli thinning of cell_net_family without building the parent: cell i
// is kept iff keyed_unit(thin_seed, i) < p, then jittered as above.
CircleFamily thinned_cell_net(double delta, const Box3& box, double p, uint64_t net_seed,
                              uint64_t thin_seed);

struct BipartitePair {
    CircleFamily white;
    CircleFamily black;
    double t = 0.0;
};

// Checks t <= d(w,b) <= 100t across, d <= t within each side.
bool validate_bipartite(const BipartitePair& pair);

// Picks two balls of radius t/20 in (center, radius) space whose members
// form a valid t-bipartite pair, densest pair first. Throws NoValidSplit.
BipartitePair bipartite_split(const CircleFamily& family, double t);

// Keeps each circle independently with probability p, keyed by
// (seed, index); deterministic and a subset of the input.
CircleFamily bernoulli_thin(const CircleFamily& family, double p, uint64_t seed);

// Minimum pairwise d over the family (spatial hash; exact).
double min_pairwise_d(const CircleFamily& family);

// Strict separation test: min pairwise d > threshold.
bool validate_separation(const CircleFamily& family, double threshold);

// Kind-specific invariant: DeltaNet requires strict d > delta, Lattice
// d >= delta (nearest neighbors sit exactly at delta), Knapp d > delta/2,
// RadiiSeparatedNet radii gaps >= delta, Thinned/Custom distinctness.
bool validate_separation(const CircleFamily& family);

} // namespace incidence::families
