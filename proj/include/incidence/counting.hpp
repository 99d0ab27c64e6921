#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "incidence/families.hpp"
#include "incidence/geom.hpp"

namespace incidence::counting {

using families::CircleFamily;
using geom::Circle;
using geom::TangencyRectangle;
using geom::Vec2;

struct ToleranceRequired : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct HypothesisViolated : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Unordered pairs with |x-y| = |r-s| exactly: the integer identity
// (dj)^2 + (dk)^2 = (dl)^2 for lattice-coded circles, a stated tolerance
// otherwise. The lattice path probes a position hash with the precomputed
// solution-vector set, O(|C| * S(N)) instead of O(|C|^2).
int64_t count_exact_tangent_pairs(const CircleFamily& family,
                                  std::optional<double> tolerance = std::nullopt);

// O(n^2) oracle for the same count.
int64_t count_exact_tangent_pairs_brute(const CircleFamily& family,
                                        std::optional<double> tolerance = std::nullopt);

// Unordered pairs with internal defect < delta_frac * family.delta and
// d in [d_lo, d_hi]. Radius-bucketed ring queries against a center hash.
int64_t count_delta_tangent_pairs(const CircleFamily& family, double delta_frac, double d_lo,
                                  double d_hi);
int64_t count_delta_tangent_pairs_brute(const CircleFamily& family, double delta_frac, double d_lo,
                                        double d_hi);

struct MultiplicityGrid {
    Vec2 origin;
    double spacing = 0.0;
    int nx = 0, ny = 0;
    double delta = 0.0;
    std::vector<uint32_t> counts; // row-major

    uint32_t at(int ix, int iy) const { return counts[static_cast<size_t>(iy) * nx + ix]; }
    Vec2 point(int ix, int iy) const {
        return {origin.x + spacing * static_cast<double>(ix), origin.y + spacing * static_cast<double>(iy)};
    }
    uint32_t max_count() const;
};

struct Window2 {
    Vec2 lo;
    Vec2 hi;
};

// Per-point annulus membership counts, counts[p] = #{C : ||p-x|-r| <= delta}.
MultiplicityGrid multiplicity_grid(const CircleFamily& family, double delta, double spacing,
                                   const Window2& window);

struct EpsTBucket {
    double eps = 0.0;
    double t = 0.0;
};

// Arc-length fraction of the circle where the multiplicity of the family
// (optionally restricted to the (eps, t) tangency neighborhood of c)
// exceeds the threshold; sampled at arc spacing delta/4.
double high_multiplicity_fraction(const Circle& c, const CircleFamily& family, double delta,
                                  double threshold,
                                  std::optional<EpsTBucket> restrict_bucket = std::nullopt);

struct RectangleTypeRecord {
    TangencyRectangle rectangle;
    uint32_t mu = 0; // tangent circles from W
    uint32_t nu = 0; // tangent circles from B
};

struct TypeRectangleMode {
    bool good_only = false;
    double A = 0.0; // good = type (>=1,>=1) but neither count reaches A^2
};

// Candidate rectangles from every delta-tangent (w, b) intersection, reduced
// to a pairwise-incomparable subset greedily by descending mu+nu (ties:
// angle, then base center), each annotated with tangency counts over W and B.
std::vector<RectangleTypeRecord> type_rectangles(const CircleFamily& white,
                                                 const CircleFamily& black, double t, double delta,
                                                 TypeRectangleMode mode = {});

// C_eps (mn)^eps ((mn/(mu nu))^{3/4} + m/mu + n/nu).
double wolff_bound(int64_t m, int64_t n, int64_t mu, int64_t nu, double eps, double C_eps);

struct NeighborhoodCount {
    int64_t count = 0;
    double bound = 0.0; // (eps t^2 / delta^3) min(sqrt(eps/tau), eps/sqrt(beta tau))
};

// |C^{c1}_{eps t} n C^{c2}_{eps t}| over the family, with the two-circle
// bound evaluated at beta = internal defect, tau = d of the fixed pair.
NeighborhoodCount neighborhood_intersection_count(const CircleFamily& family, const Circle& c1,
                                                  const Circle& c2, double eps, double t);

// Exact tangency-point clustering for lattice families: groups tangencies by
// (rational tangency point, center line), then counts groups whose circle
// count lies in [mu, 10 mu].
int64_t mu_fold_points(const CircleFamily& family, int64_t mu);

struct VolumeEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    double bound = 0.0; // eps^3 / lam^3
    int64_t hits = 0;
    int64_t trials = 0;
};

// Monte Carlo measure of the three-circle set: (x, r) in [-4,4]^2 x (0,8]
// with all three internal defects < eps, distances > t, annuli meeting, and
// pairwise lambda-separated intersections.
VolumeEstimate three_circle_set_volume(const Circle& c1, const Circle& c2, const Circle& c3,
                                       double eps, double t, double lam, int64_t trials,
                                       uint64_t seed, double a0 = geom::kDefaultA0);

// Pair census by dyadic (eps, t): eps bucket chosen with
// eps - delta <= defect <= 2 eps, t the dyadic scale of d. Buckets sum to
// the total pair count.
struct BucketedPairs {
    std::map<std::pair<int, int>, int64_t> counts; // (log2 eps/delta, log2 t) -> pairs
    int64_t total = 0;
};
BucketedPairs bucketed_pair_counts(const CircleFamily& family);

// Census of a family: parameters, (eps, t)-bucketed pair counts, rectangle
// type counts when a bipartite run supplies them, and throughput.
struct IncidenceReport {
    std::string family_kind;
    double delta = 0.0;
    size_t family_size = 0;
    BucketedPairs buckets;
    std::map<std::pair<uint32_t, uint32_t>, int64_t> rectangle_types; // (mu, nu) -> count
    std::map<int, int64_t> rectangles_by_t;                           // log2 t -> count
    std::map<int, std::pair<uint32_t, uint32_t>> peak_type_by_t;      // log2 t -> (mu, nu)
    double wall_seconds = 0.0;
    double pairs_per_second = 0.0;
};

IncidenceReport incidence_report(const CircleFamily& family,
                                 const std::vector<RectangleTypeRecord>& rectangles = {});

} // namespace incidence::counting
