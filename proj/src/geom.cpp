#include "incidence/geom.hpp"

#include <algorithm>

namespace incidence::geom {

namespace {

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a > M_PI) a -= 2.0 * M_PI;
    if (a < -M_PI) a += 2.0 * M_PI;
    return a;
}

} // namespace

PairMetrics pair_metrics(const Circle& c1, const Circle& c2) {
    if (c1.lattice && c2.lattice) {
        const auto& p = *c1.lattice;
        const auto& q = *c2.lattice;
        const int64_t a = q[0] - p[0], b = q[1] - p[1], c = q[2] - p[2];
        const int64_t cc = a * a + b * b;
        const double delta = c1.radius / static_cast<double>(p[2]);
        const double center_dist = std::sqrt(static_cast<double>(cc));
        const double radius_gap = static_cast<double>(std::abs(c));
        PairMetrics m;
        m.delta_tan = (cc == c * c) ? 0.0 : std::abs(center_dist - radius_gap) * delta;
        m.dist = (center_dist + radius_gap) * delta;
        return m;
    }
    const double center_dist = norm(c1.center - c2.center);
    const double radius_gap = std::abs(c1.radius - c2.radius);
    return {std::abs(center_dist - radius_gap), center_dist + radius_gap};
}

double external_defect(const Circle& c1, const Circle& c2) {
    return std::abs(norm(c1.center - c2.center) - (c1.radius + c2.radius));
}

double tangency_defect(const Circle& c1, const Circle& c2) {
    return std::min(pair_metrics(c1, c2).delta_tan, external_defect(c1, c2));
}

bool lattice_exact_tangent(const Circle& c1, const Circle& c2) {
    if (!c1.lattice || !c2.lattice) throw std::invalid_argument("lattice_exact_tangent: lattice coords required");
    const auto& p = *c1.lattice;
    const auto& q = *c2.lattice;
    const int64_t a = q[0] - p[0], b = q[1] - p[1], c = q[2] - p[2];
    if (a == 0 && b == 0 && c == 0) return false;
    return a * a + b * b == c * c;
}

IntersectionBounds intersection_bounds(const Circle& c1, const Circle& c2, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("intersection_bounds: delta must be positive");
    const PairMetrics m = pair_metrics(c1, c2);
    const double prod = (m.delta_tan + delta) * (m.dist + delta);
    return {delta * delta / std::sqrt(prod), std::sqrt((m.delta_tan + delta) / (m.dist + delta))};
}

double curve_distance(const Circle& c1, const Circle& c2) {
    const double center_dist = norm(c1.center - c2.center);
    const double sum = c1.radius + c2.radius;
    const double gap = std::abs(c1.radius - c2.radius);
    return std::max({0.0, center_dist - sum, gap - center_dist});
}

bool annuli_intersect(const Circle& c1, const Circle& c2, double delta) {
    return curve_distance(c1, c2) <= 2.0 * delta + kUnitTol;
}

bool is_delta_tangent(const Circle& c1, const Circle& c2, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("is_delta_tangent: delta must be positive");
    return tangency_defect(c1, c2) <= delta + kUnitTol && annuli_intersect(c1, c2, delta);
}

double dyadic_t(double d) {
    if (!(d > 0.0)) throw std::invalid_argument("dyadic_t: d must be positive");
    return std::exp2(std::ceil(std::log2(d)));
}

double TangencyRectangle::distance_to_arc(Vec2 p) const {
    const Vec2 v = p - base.center;
    const double rho = norm(v);
    const double ang = std::atan2(v.y, v.x);
    const double off = wrap_angle(ang - arc_center_angle);
    if (std::abs(off) <= half_angle()) return std::abs(rho - base.radius);
    const double end = (off > 0.0) ? arc_center_angle + half_angle() : arc_center_angle - half_angle();
    return norm(p - base.point_at(end));
}

std::vector<TangencyRectangle> cover_intersection_rectangles(const Circle& c1, const Circle& c2,
                                                             double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("cover_intersection_rectangles: delta must be positive");
    const double center_dist = norm(c1.center - c2.center);
    const double pair_d = pair_metrics(c1, c2).dist;
    if (pair_d <= kUnitTol)
        throw std::domain_error("cover_intersection_rectangles: identical circles have no t scale");
    if (tangency_defect(c1, c2) > delta + kUnitTol)
        throw std::domain_error("cover_intersection_rectangles: pair is not delta-tangent");
    const double t = dyadic_t(pair_d);

    // Angles are measured from the direction c1.center -> c2.center. A point
    // of c1 at offset phi has |p - y|^2 = r^2 + D^2 - 2 r D cos(phi); the
    // annulus intersection projects into the sublevel set
    // { phi : | |p - y| - s | <= 2 delta }, which is symmetric in phi and
    // consists of at most two arcs.
    const double r = c1.radius, s = c2.radius, D = center_dist;
    if (D <= kUnitTol) throw std::domain_error("cover_intersection_rectangles: concentric circles");
    const double axis = std::atan2(c2.center.y - c1.center.y, c2.center.x - c1.center.x);

    const double hi = s + 2.0 * delta;
    const double lo = std::max(0.0, s - 2.0 * delta);
    const double cos_min = std::clamp((r * r + D * D - hi * hi) / (2.0 * r * D), -1.0, 1.0);
    const double cos_max = std::clamp((r * r + D * D - lo * lo) / (2.0 * r * D), -1.0, 1.0);
    double phi_lo = std::acos(cos_max);
    double phi_hi = std::acos(cos_min);
    if (phi_hi < phi_lo) std::swap(phi_lo, phi_hi);

    struct Arc {
        double center;
        double half_width;
    };
    std::vector<Arc> arcs;
    const bool touch_zero = phi_lo <= kUnitTol;
    const bool touch_pi = phi_hi >= M_PI - kUnitTol;
    if (touch_zero && touch_pi) {
        throw std::domain_error("cover_intersection_rectangles: intersection wraps the full circle");
    } else if (touch_zero) {
        arcs.push_back({0.0, phi_hi});
    } else if (touch_pi) {
        arcs.push_back({M_PI, M_PI - phi_lo});
    } else {
        arcs.push_back({0.5 * (phi_lo + phi_hi), 0.5 * (phi_hi - phi_lo)});
        arcs.push_back({-0.5 * (phi_lo + phi_hi), 0.5 * (phi_hi - phi_lo)});
    }

    std::vector<TangencyRectangle> out;
    for (const Arc& a : arcs) {
        // Inflate the rectangle width (by powers of two, bounded) until its
        // arc window covers the lobe.
        double rect_delta = delta;
        int doublings = 0;
        while (std::sqrt(rect_delta / t) < 2.0 * a.half_width * r + kUnitTol) {
            rect_delta *= 2.0;
            if (++doublings > 8)
                throw std::domain_error("cover_intersection_rectangles: degenerate pair, lobe too long");
        }
        TangencyRectangle rect;
        rect.base = c1;
        rect.arc_center_angle = wrap_angle(axis + a.center);
        rect.delta = rect_delta;
        rect.t = t;
        out.push_back(rect);
    }
    return out;
}

namespace {

// Sample points along a rectangle spine at spacing <= delta/4.
std::vector<Vec2> arc_samples(const TangencyRectangle& r) {
    const double len = r.arc_length();
    const int n = std::max(2, static_cast<int>(std::ceil(len / (r.delta / 4.0))) + 1);
    std::vector<Vec2> pts;
    pts.reserve(n);
    const double a0 = r.arc_center_angle - r.half_angle();
    const double a1 = r.arc_center_angle + r.half_angle();
    for (int i = 0; i < n; ++i) {
        const double a = a0 + (a1 - a0) * static_cast<double>(i) / static_cast<double>(n - 1);
        pts.push_back(r.base.point_at(a));
    }
    return pts;
}

// Containment test against candidate rectangles on this base, at the joint
// scale delta* = max of the two widths. A rectangle is inside the candidate
// iff its spine stays a0 delta* - (own width) clear of the base circle
// radially while the spine angles fit the candidate arc window; the width
// margin absorbs each spine's own fattening (dist(z, arc) <= own_delta +
// radial clearance).
bool comparable_against_base(const TangencyRectangle& rb, const TangencyRectangle& ro, double a0) {
    const Circle& base = rb.base;
    const double delta_star = std::max(rb.delta, ro.delta);
    const double t = rb.t;
    const double window = std::min(std::sqrt(a0 * delta_star / t), 2.0 * M_PI * base.radius);

    double ang_min = 0.0, ang_max = 0.0;
    bool first = true;
    auto absorb = [&](Vec2 p, double own_delta) -> bool {
        const Vec2 v = p - base.center;
        const double rho = norm(v);
        if (std::abs(rho - base.radius) > a0 * delta_star - own_delta + kUnitTol) return false;
        const double off = wrap_angle(std::atan2(v.y, v.x) - rb.arc_center_angle);
        if (first) {
            ang_min = ang_max = off;
            first = false;
        } else {
            ang_min = std::min(ang_min, off);
            ang_max = std::max(ang_max, off);
        }
        return true;
    };
    for (Vec2 p : arc_samples(rb))
        if (!absorb(p, rb.delta)) return false;
    for (Vec2 p : arc_samples(ro))
        if (!absorb(p, ro.delta)) return false;

    return (ang_max - ang_min) * base.radius <= window + kUnitTol;
}

} // namespace

bool rectangles_comparable(const TangencyRectangle& r1, const TangencyRectangle& r2, double a0) {
    if (!(a0 >= 1.0)) throw std::invalid_argument("rectangles_comparable: a0 must be >= 1");
    if (std::abs(std::log2(r1.t / r2.t)) > 0.5)
        throw std::invalid_argument("rectangles_comparable: rectangles must share the t scale");
    return comparable_against_base(r1, r2, a0) || comparable_against_base(r2, r1, a0);
}

bool circle_tangent_to_rectangle(const Circle& c, const TangencyRectangle& r, double a1) {
    if (!(a1 > 0.0)) throw std::invalid_argument("circle_tangent_to_rectangle: a1 must be positive");
    auto near_circle = [&](Vec2 p) {
        return std::abs(norm(p - c.center) - c.radius) <= a1 * r.delta + kUnitTol;
    };
    for (Vec2 p : arc_samples(r))
        if (!near_circle(p)) return false;
    for (double end : {r.arc_center_angle - r.half_angle(), r.arc_center_angle + r.half_angle()}) {
        const Vec2 p = r.base.point_at(end);
        const Vec2 n = unit_at(end);
        if (!near_circle(p + r.delta * n)) return false;
        if (!near_circle(p - r.delta * n)) return false;
    }
    return true;
}

double DefiningFunction::phi(const std::vector<double>& x, const std::vector<double>& y) const {
    if (static_cast<int>(x.size()) != dimension || static_cast<int>(y.size()) != dimension)
        throw std::invalid_argument("DefiningFunction: dimension mismatch");
    if (kind == Kind::Sphere) {
        double s = 0.0;
        for (int i = 0; i < dimension; ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
        return std::sqrt(s) - 1.0;
    }
    double s = 0.0;
    for (int i = 0; i < dimension; ++i) s += x[i] * y[i];
    return s - 1.0;
}

std::vector<double> DefiningFunction::grad_x(const std::vector<double>& x,
                                             const std::vector<double>& y) const {
    std::vector<double> g(dimension);
    if (kind == Kind::Sphere) {
        double n = 0.0;
        for (int i = 0; i < dimension; ++i) n += (x[i] - y[i]) * (x[i] - y[i]);
        n = std::sqrt(n);
        for (int i = 0; i < dimension; ++i) g[i] = (x[i] - y[i]) / n;
    } else {
        for (int i = 0; i < dimension; ++i) g[i] = y[i];
    }
    return g;
}

std::vector<double> DefiningFunction::grad_y(const std::vector<double>& x,
                                             const std::vector<double>& y) const {
    std::vector<double> g(dimension);
    if (kind == Kind::Sphere) {
        double n = 0.0;
        for (int i = 0; i < dimension; ++i) n += (x[i] - y[i]) * (x[i] - y[i]);
        n = std::sqrt(n);
        for (int i = 0; i < dimension; ++i) g[i] = (y[i] - x[i]) / n;
    } else {
        for (int i = 0; i < dimension; ++i) g[i] = x[i];
    }
    return g;
}

std::vector<double> DefiningFunction::mixed_hessian(const std::vector<double>& x,
                                                    const std::vector<double>& y) const {
    const int d = dimension;
    std::vector<double> h(d * d, 0.0);
    if (kind == Kind::Sphere) {
        // d/dx_i [ (y_j - x_j)/|x-y| ] = -(delta_ij - u_i u_j)/|x-y|.
        double n = 0.0;
        for (int i = 0; i < d; ++i) n += (x[i] - y[i]) * (x[i] - y[i]);
        n = std::sqrt(n);
        for (int i = 0; i < d; ++i) {
            const double ui = (x[i] - y[i]) / n;
            for (int j = 0; j < d; ++j) {
                const double uj = (x[j] - y[j]) / n;
                h[i * d + j] = -((i == j ? 1.0 : 0.0) - ui * uj) / n;
            }
        }
    } else {
        for (int i = 0; i < d; ++i) h[i * d + i] = 1.0;
    }
    return h;
}

double dense_det(std::vector<double> m, int n) {
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int row = col + 1; row < n; ++row)
            if (std::abs(m[row * n + col]) > std::abs(m[pivot * n + col])) pivot = row;
        if (m[pivot * n + col] == 0.0) return 0.0;
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(m[pivot * n + j], m[col * n + j]);
            det = -det;
        }
        det *= m[col * n + col];
        for (int row = col + 1; row < n; ++row) {
            const double f = m[row * n + col] / m[col * n + col];
            for (int j = col; j < n; ++j) m[row * n + j] -= f * m[col * n + j];
        }
    }
    return det;
}

double rotational_curvature_det(const DefiningFunction& phi, const std::vector<double>& x,
                                const std::vector<double>& y) {
    const int d = phi.dimension;
    if (static_cast<int>(x.size()) != d || static_cast<int>(y.size()) != d)
        throw std::invalid_argument("rotational_curvature_det: dimension mismatch");
    if (phi.kind == DefiningFunction::Kind::Sphere) {
        double n = 0.0;
        for (int i = 0; i < d; ++i) n += (x[i] - y[i]) * (x[i] - y[i]);
        if (std::sqrt(n) < 1e-12)
            throw std::domain_error("rotational_curvature_det: x = y is singular for the sphere");
    }
    const double f = phi.phi(x, y);
    if (std::abs(f) > 1e-9)
        throw std::domain_error("rotational_curvature_det: point is not on the zero set");

    const int n = d + 1;
    std::vector<double> m(n * n);
    const auto gx = phi.grad_x(x, y);
    const auto gy = phi.grad_y(x, y);
    const auto h = phi.mixed_hessian(x, y);
    m[0] = f;
    for (int j = 0; j < d; ++j) m[j + 1] = gy[j];
    for (int i = 0; i < d; ++i) {
        m[(i + 1) * n] = gx[i];
        for (int j = 0; j < d; ++j) m[(i + 1) * n + (j + 1)] = h[i * d + j];
    }
    return dense_det(std::move(m), n);
}

} // namespace incidence::geom
