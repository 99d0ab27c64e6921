#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "incidence/rng.hpp"

namespace incidence::probab {

// Regions that samples are drawn from / measured against. Dimension is the
// ambient dimension; the annulus kind exists for the planar level-set
// experiments and is not sampleable.
struct RegionSpec {
    enum class Kind { Ball, UnionOfBalls, Box, Annulus };
    Kind kind = Kind::Ball;
    int dimension = 2;

    std::vector<std::vector<double>> centers; // Ball/UnionOfBalls
    double rho = 1.0;                         // ball radius
    std::vector<double> corner, sides;        // Box
    double ring_radius = 1.0, ring_halfwidth = 0.1;

    static RegionSpec ball(std::vector<double> center, double rho);
    // Centers must be pairwise separated by > 2 rho (disjointness; the
    // stronger 6-delta style separation is the caller's concern).
    static RegionSpec union_of_balls(std::vector<std::vector<double>> centers, double rho);
    static RegionSpec box(std::vector<double> corner, std::vector<double> sides);
    static RegionSpec annulus(std::vector<double> center, double radius, double halfwidth);

    double volume() const;
    bool contains(const std::vector<double>& p) const;
    std::vector<double> sample(CounterRng& rng) const;
    // Axis-aligned bounding box as (lo, hi) pairs.
    std::vector<std::pair<double, double>> bounds() const;
};

double unit_ball_volume(int n);

struct TailResult {
    double probability = 0.0;
    bool within_hypothesis = true; // p <= 1/2 and alpha <= 1/2
};

// P[ sum X_j < alpha N p ] for iid Bernoulli(p), summed exactly in
// log space (long double); relative error well under 1e-10.
TailResult binomial_tail(int64_t N, double p, double alpha);

// The closed-form bound N exp(-p N (1-alpha)^2 / (2(1-p))) the tail is
// checked against.
double binomial_tail_bound(int64_t N, double p, double alpha);

// Volume of the simplex on d points of dimension d-1:
// |det(y_2-y_1, ..., y_d-y_1)| / (d-1)!.
double simplex_volume(const std::vector<std::vector<double>>& points);

struct SimplexMode {
    bool min_perturbed = false;
    double delta = 0.0; // vertex perturbation radius is delta/4
    double c0 = 0.0;    // measured constant; threshold is c0 3^{1-d} |S|
};

struct ProbEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    int64_t hits = 0;
    int64_t trials = 0;
    double threshold = 0.0; // the volume threshold used per trial
    double floor_bound = 0.0; // 6/12^d for the min-perturbed mode
};

// Plain: P[ simplex volume <= eps |S| ] with d vertices uniform in S.
// MinPerturbed: P[ certified min over delta/4 perturbations > c0 3^{1-d}|S| ],
// the inner minimum lower-bounded by sequential worst-case vertex moves.
ProbEstimate simplex_probability(const RegionSpec& S, int d, double eps, int64_t trials,
                                 uint64_t seed, SimplexMode mode = {});

// The certified lower bound used by the min-perturbed mode (exposed for
// tests): vol minus the worst-case loss of moving each vertex by tau.
double min_perturbed_volume_bound(const std::vector<std::vector<double>>& points, double tau);

} // namespace incidence::probab
