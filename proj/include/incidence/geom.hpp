#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace incidence::geom {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 unit_at(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Absolute tolerance for floating comparisons at unit scale. Lattice
// families never rely on it; their tangency tests run on integers.
inline constexpr double kUnitTol = 1e-12;

// Default comparability / rectangle-tangency constants. The source material
// leaves them as unnamed absolute constants; exponent experiments are
// insensitive to the exact value.
inline constexpr double kDefaultA0 = 4.0;
inline constexpr double kDefaultA1 = 4.0;

struct Circle {
    Vec2 center;
    double radius = 1.0;
    // Present when the circle is C(j*delta, k*delta, l*delta) from a rescaled
    // integer lattice; carried so tangency tests can run exactly.
    std::optional<std::array<int64_t, 3>> lattice;

    Circle() = default;
    Circle(Vec2 c, double r) : center(c), radius(r) {
        if (!(r > 0.0)) throw std::invalid_argument("Circle: radius must be positive");
    }
    Circle(Vec2 c, double r, std::array<int64_t, 3> jkl) : Circle(c, r) { lattice = jkl; }

    Vec2 point_at(double angle) const { return center + radius * unit_at(angle); }
};

inline Circle lattice_circle(int64_t j, int64_t k, int64_t l, double delta) {
    return Circle({static_cast<double>(j) * delta, static_cast<double>(k) * delta},
                  static_cast<double>(l) * delta, {j, k, l});
}

// Internal tangency defect and separation scale of a circle pair:
//   delta_tan = | |x-y| - |r-s| |,   dist = |x-y| + |r-s|.
struct PairMetrics {
    double delta_tan = 0.0;
    double dist = 0.0;
};

PairMetrics pair_metrics(const Circle& c1, const Circle& c2);

// Defect from the external tangency branch, | |x-y| - (r+s) |. Zero iff the
// circles touch externally.
double external_defect(const Circle& c1, const Circle& c2);

// min(internal, external) defect; the distance-to-tangency in either branch.
double tangency_defect(const Circle& c1, const Circle& c2);

// True iff the two lattice circles satisfy |x-y| = |r-s| exactly, i.e.
// (dj)^2 + (dk)^2 = (dl)^2 over the integers. Requires lattice coords.
bool lattice_exact_tangent(const Circle& c1, const Circle& c2);

struct IntersectionBounds {
    double area_bound = 0.0;
    double diam_bound = 0.0;
};

// Upper-bound expressions for the area/diameter of the intersection of the
// two delta-annuli: delta^2 / sqrt((D+delta)(d+delta)) and
// sqrt((D+delta)/(d+delta)) with D = delta_tan, d = dist.
IntersectionBounds intersection_bounds(const Circle& c1, const Circle& c2, double delta);

// Distance between the circle curves; the delta-annuli meet iff this is
// <= 2*delta.
double curve_distance(const Circle& c1, const Circle& c2);
bool annuli_intersect(const Circle& c1, const Circle& c2, double delta);

// delta-tangency: tangency defect at most delta and nonempty annulus
// intersection. Covers both tangency branches; the internal one alone would
// reject externally touching pairs that plainly share a tangency rectangle.
bool is_delta_tangent(const Circle& c1, const Circle& c2, double delta);

// Dyadic scale: the power of two t with t/2 < d <= t.
double dyadic_t(double d);

// A (delta,t)-rectangle: the delta-neighborhood of an arc of length
// sqrt(delta/t) on the base circle.
struct TangencyRectangle {
    Circle base;
    double arc_center_angle = 0.0;
    double delta = 0.0;
    double t = 0.0;

    double arc_length() const { return std::sqrt(delta / t); }
    double half_angle() const { return arc_length() / (2.0 * base.radius); }
    Vec2 arc_center_point() const { return base.point_at(arc_center_angle); }

    // Distance from p to the spine arc; the rectangle is {dist <= delta}.
    double distance_to_arc(Vec2 p) const;
    bool contains(Vec2 p) const { return distance_to_arc(p) <= delta + kUnitTol; }
};

// Covers C^delta(c1) n C^delta(c2) by at most two rectangles on c1 sharing
// the pair's dyadic t. The returned rectangles may carry a width inflated by
// a bounded power of two: the intersection lobes have arc length
// const*sqrt(delta/t) and the covering constant is realized as that
// inflation rather than as extra rectangles.
std::vector<TangencyRectangle> cover_intersection_rectangles(const Circle& c1, const Circle& c2,
                                                             double delta);

// True iff some (a0*delta, t)-rectangle contains both. Decided by radial
// clearance plus angular-hull tests against each base circle in turn; see
// the implementation for the margins that make the test conservative.
bool rectangles_comparable(const TangencyRectangle& r1, const TangencyRectangle& r2,
                           double a0 = kDefaultA0);

// True iff the a1*delta-neighborhood of c contains the rectangle, tested on
// an arc sample of spacing <= delta/4 plus the rectangle's corners.
bool circle_tangent_to_rectangle(const Circle& c, const TangencyRectangle& r,
                                 double a1 = kDefaultA1);

// Defining functions with nonvanishing rotational curvature:
//   Sphere: Phi_S(x,y) = |x-y| - 1,   Plane: Phi_P(x,y) = x.y - 1.
struct DefiningFunction {
    enum class Kind { Sphere, Plane };
    Kind kind = Kind::Sphere;
    int dimension = 2;

    DefiningFunction(Kind k, int d) : kind(k), dimension(d) {
        if (d < 2) throw std::invalid_argument("DefiningFunction: dimension must be >= 2");
    }

    double phi(const std::vector<double>& x, const std::vector<double>& y) const;
    std::vector<double> grad_x(const std::vector<double>& x, const std::vector<double>& y) const;
    std::vector<double> grad_y(const std::vector<double>& x, const std::vector<double>& y) const;
    // d x d matrix of d^2 Phi / dx_i dy_j, row-major.
    std::vector<double> mixed_hessian(const std::vector<double>& x,
                                      const std::vector<double>& y) const;
};

// det of the (d+1)x(d+1) block matrix [[Phi, dPhi/dy], [dPhi/dx, d2Phi/dxdy]]
// evaluated with closed-form derivatives. Requires |Phi(x,y)| <= 1e-9 and,
// for the sphere, x != y.
double rotational_curvature_det(const DefiningFunction& phi, const std::vector<double>& x,
                                const std::vector<double>& y);

// Plain Gaussian-elimination determinant for the small matrices used here.
double dense_det(std::vector<double> m, int n);

} // namespace incidence::geom
