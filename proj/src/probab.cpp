#include "incidence/probab.hpp"

#include <algorithm>
#include <cmath>

namespace incidence::probab {

RegionSpec RegionSpec::ball(std::vector<double> center, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("RegionSpec::ball: rho must be positive");
    RegionSpec s;
    s.kind = Kind::Ball;
    s.dimension = static_cast<int>(center.size());
    s.centers = {std::move(center)};
    s.rho = rho;
    return s;
}

RegionSpec RegionSpec::union_of_balls(std::vector<std::vector<double>> centers, double rho) {
    if (centers.empty()) throw std::invalid_argument("RegionSpec::union_of_balls: no centers");
    RegionSpec s;
    s.kind = Kind::UnionOfBalls;
    s.dimension = static_cast<int>(centers[0].size());
    s.rho = rho;
    for (size_t i = 0; i < centers.size(); ++i)
        for (size_t j = i + 1; j < centers.size(); ++j) {
            double d2 = 0.0;
            for (size_t k = 0; k < centers[i].size(); ++k) {
                const double d = centers[i][k] - centers[j][k];
                d2 += d * d;
            }
            if (d2 <= 4.0 * rho * rho)
                throw std::invalid_argument("RegionSpec::union_of_balls: centers not > 2 rho apart");
        }
    s.centers = std::move(centers);
    return s;
}

RegionSpec RegionSpec::box(std::vector<double> corner, std::vector<double> sides) {
    if (corner.size() != sides.size()) throw std::invalid_argument("RegionSpec::box: size mismatch");
    RegionSpec s;
    s.kind = Kind::Box;
    s.dimension = static_cast<int>(corner.size());
    s.corner = std::move(corner);
    s.sides = std::move(sides);
    for (double v : s.sides)
        if (!(v > 0.0)) throw std::invalid_argument("RegionSpec::box: sides must be positive");
    return s;
}

RegionSpec RegionSpec::annulus(std::vector<double> center, double radius, double halfwidth) {
    if (center.size() != 2) throw std::invalid_argument("RegionSpec::annulus: planar only");
    if (!(radius > halfwidth && halfwidth > 0.0))
        throw std::invalid_argument("RegionSpec::annulus: need radius > halfwidth > 0");
    RegionSpec s;
    s.kind = Kind::Annulus;
    s.dimension = 2;
    s.centers = {std::move(center)};
    s.ring_radius = radius;
    s.ring_halfwidth = halfwidth;
    return s;
}

double unit_ball_volume(int n) {
    // V_n = pi^{n/2} / Gamma(n/2 + 1)
    return std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

double RegionSpec::volume() const {
    switch (kind) {
        case Kind::Ball:
            return unit_ball_volume(dimension) * std::pow(rho, dimension);
        case Kind::UnionOfBalls:
            return static_cast<double>(centers.size()) * unit_ball_volume(dimension) *
                   std::pow(rho, dimension);
        case Kind::Box: {
            double v = 1.0;
            for (double s : sides) v *= s;
            return v;
        }
        case Kind::Annulus: {
            const double r_out = ring_radius + ring_halfwidth, r_in = ring_radius - ring_halfwidth;
            return M_PI * (r_out * r_out - r_in * r_in);
        }
    }
    return 0.0;
}

bool RegionSpec::contains(const std::vector<double>& p) const {
    switch (kind) {
        case Kind::Ball:
        case Kind::UnionOfBalls: {
            for (const auto& c : centers) {
                double d2 = 0.0;
                for (size_t k = 0; k < c.size(); ++k) {
                    const double d = p[k] - c[k];
                    d2 += d * d;
                }
                if (d2 <= rho * rho) return true;
            }
            return false;
        }
        case Kind::Box: {
            for (size_t k = 0; k < corner.size(); ++k)
                if (p[k] < corner[k] || p[k] > corner[k] + sides[k]) return false;
            return true;
        }
        case Kind::Annulus: {
            const double dx = p[0] - centers[0][0], dy = p[1] - centers[0][1];
            return std::abs(std::hypot(dx, dy) - ring_radius) <= ring_halfwidth;
        }
    }
    return false;
}

std::vector<std::pair<double, double>> RegionSpec::bounds() const {
    std::vector<std::pair<double, double>> b(dimension);
    switch (kind) {
        case Kind::Ball:
        case Kind::UnionOfBalls:
            for (int k = 0; k < dimension; ++k) {
                double lo = centers[0][k], hi = centers[0][k];
                for (const auto& c : centers) {
                    lo = std::min(lo, c[k]);
                    hi = std::max(hi, c[k]);
                }
                b[k] = {lo - rho, hi + rho};
            }
            return b;
        case Kind::Box:
            for (int k = 0; k < dimension; ++k) b[k] = {corner[k], corner[k] + sides[k]};
            return b;
        case Kind::Annulus: {
            const double r = ring_radius + ring_halfwidth;
            for (int k = 0; k < 2; ++k) b[k] = {centers[0][k] - r, centers[0][k] + r};
            return b;
        }
    }
    return b;
}

std::vector<double> RegionSpec::sample(CounterRng& rng) const {
    switch (kind) {
        case Kind::Ball:
        case Kind::UnionOfBalls: {
            // Equal radii: pick a ball uniformly, then rejection-sample it.
            const auto& c = centers[kind == Kind::Ball ? 0 : rng.next_below(centers.size())];
            std::vector<double> p(dimension);
            for (;;) {
                double d2 = 0.0;
                for (int k = 0; k < dimension; ++k) {
                    p[k] = rng.next_range(-1.0, 1.0);
                    d2 += p[k] * p[k];
                }
                if (d2 <= 1.0) break;
            }
            for (int k = 0; k < dimension; ++k) p[k] = c[k] + rho * p[k];
            return p;
        }
        case Kind::Box: {
            std::vector<double> p(dimension);
            for (int k = 0; k < dimension; ++k) p[k] = corner[k] + sides[k] * rng.next_unit();
            return p;
        }
        case Kind::Annulus: {
            // Rejection from the bounding square of the outer circle.
            std::vector<double> p(2);
            for (;;) {
                const double r_out = ring_radius + ring_halfwidth;
                p[0] = centers[0][0] + rng.next_range(-r_out, r_out);
                p[1] = centers[0][1] + rng.next_range(-r_out, r_out);
                if (contains(p)) return p;
            }
        }
    }
    throw std::logic_error("RegionSpec::sample: bad kind");
}

TailResult binomial_tail(int64_t N, double p, double alpha) {
    if (N < 1) throw std::invalid_argument("binomial_tail: N must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial_tail: p must be in [0,1]");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("binomial_tail: alpha in (0,1]");
    TailResult out;
    out.within_hypothesis = (p <= 0.5 && alpha <= 0.5);
    if (p == 0.0) {
        out.probability = 0.0; // cut = 0, the event {sum < 0} is empty
        return out;
    }
    const double cut = alpha * static_cast<double>(N) * p;
    const int64_t k_max = static_cast<int64_t>(std::ceil(cut)) - 1; // k < cut
    if (k_max < 0) {
        out.probability = 0.0;
        return out;
    }
    const long double lp = logl(static_cast<long double>(p));
    const long double lq = log1pl(static_cast<long double>(-p));
    long double sum = 0.0L;
    for (int64_t k = 0; k <= std::min(k_max, N); ++k) {
        const long double lc = lgammal(static_cast<long double>(N) + 1.0L) -
                               lgammal(static_cast<long double>(k) + 1.0L) -
                               lgammal(static_cast<long double>(N - k) + 1.0L);
        sum += expl(lc + static_cast<long double>(k) * lp + static_cast<long double>(N - k) * lq);
    }
    out.probability = static_cast<double>(std::min(sum, 1.0L));
    return out;
}

double binomial_tail_bound(int64_t N, double p, double alpha) {
    if (p >= 1.0) throw std::invalid_argument("binomial_tail_bound: p must be < 1");
    return static_cast<double>(N) *
           std::exp(-p * static_cast<double>(N) * (1.0 - alpha) * (1.0 - alpha) / (2.0 * (1.0 - p)));
}

namespace {

// Gram-determinant k-volume of the simplex spanned by edge vectors.
double span_volume(const std::vector<std::vector<double>>& edges) {
    const size_t k = edges.size();
    if (k == 0) return 1.0;
    std::vector<double> gram(k * k);
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) {
            double s = 0.0;
            for (size_t a = 0; a < edges[i].size(); ++a) s += edges[i][a] * edges[j][a];
            gram[i * k + j] = s;
        }
    // determinant of the Gram matrix (symmetric PSD)
    double det = 1.0;
    const size_t n = k;
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t row = col + 1; row < n; ++row)
            if (std::abs(gram[row * n + col]) > std::abs(gram[piv * n + col])) piv = row;
        if (gram[piv * n + col] == 0.0) return 0.0;
        if (piv != col) {
            for (size_t j = 0; j < n; ++j) std::swap(gram[piv * n + j], gram[col * n + j]);
            det = -det;
        }
        det *= gram[col * n + col];
        for (size_t row = col + 1; row < n; ++row) {
            const double f = gram[row * n + col] / gram[col * n + col];
            for (size_t j = col; j < n; ++j) gram[row * n + j] -= f * gram[col * n + j];
        }
    }
    double fact = 1.0;
    for (size_t i = 2; i <= k; ++i) fact *= static_cast<double>(i);
    return std::sqrt(std::max(0.0, det)) / fact;
}

double subsimplex_measure(const std::vector<std::vector<double>>& pts) {
    std::vector<std::vector<double>> edges;
    for (size_t i = 1; i < pts.size(); ++i) {
        std::vector<double> e(pts[i].size());
        for (size_t a = 0; a < e.size(); ++a) e[a] = pts[i][a] - pts[0][a];
        edges.push_back(std::move(e));
    }
    return span_volume(edges);
}

// Worst-case measure increase of a k-simplex when every vertex moves by at
// most tau: moving one vertex changes the measure by at most
// tau * (opposite facet) / k, facets themselves inflated recursively.
double inflation(const std::vector<std::vector<double>>& pts, double tau) {
    const size_t k = pts.size() - 1; // simplex dimension
    if (k == 0) return 0.0;
    double total = 0.0;
    for (size_t drop = 0; drop < pts.size(); ++drop) {
        std::vector<std::vector<double>> facet;
        for (size_t i = 0; i < pts.size(); ++i)
            if (i != drop) facet.push_back(pts[i]);
        total += tau / static_cast<double>(k) * (subsimplex_measure(facet) + inflation(facet, tau));
    }
    return total;
}

} // namespace

double simplex_volume(const std::vector<std::vector<double>>& points) {
    const size_t d = points.size();
    if (d < 2 || d > 6) throw std::invalid_argument("simplex_volume: need 2 <= d <= 6 points");
    for (const auto& p : points)
        if (p.size() != d - 1) throw std::invalid_argument("simplex_volume: points must have dimension d-1");
    return subsimplex_measure(points);
}

double min_perturbed_volume_bound(const std::vector<std::vector<double>>& points, double tau) {
    return subsimplex_measure(points) - inflation(points, tau);
}

ProbEstimate simplex_probability(const RegionSpec& S, int d, double eps, int64_t trials,
                                 uint64_t seed, SimplexMode mode) {
    if (d != S.dimension + 1)
        throw std::invalid_argument("simplex_probability: d must equal S.dimension + 1");
    if (d < 2 || d > 6) throw std::invalid_argument("simplex_probability: need 2 <= d <= 6");
    if (trials < 10000) throw std::invalid_argument("simplex_probability: trials >= 10^4");

    const double vol_S = S.volume();
    ProbEstimate out;
    out.trials = trials;
    if (mode.min_perturbed) {
        out.threshold = mode.c0 * std::pow(3.0, 1 - d) * vol_S;
        out.floor_bound = 6.0 * std::pow(12.0, -d);
    } else {
        out.threshold = eps * vol_S;
    }

    for (int64_t trial = 0; trial < trials; ++trial) {
        CounterRng rng(seed, 40000 + static_cast<uint64_t>(trial));
        std::vector<std::vector<double>> pts(d);
        for (int i = 0; i < d; ++i) pts[i] = S.sample(rng);
        if (mode.min_perturbed) {
            if (min_perturbed_volume_bound(pts, mode.delta / 4.0) > out.threshold) ++out.hits;
        } else {
            if (subsimplex_measure(pts) <= out.threshold) ++out.hits;
        }
    }
    const double p = static_cast<double>(out.hits) / static_cast<double>(out.trials);
    out.estimate = p;
    out.std_error = std::sqrt(std::max(0.0, p * (1.0 - p) / static_cast<double>(out.trials)));
    return out;
}

} // namespace incidence::probab
