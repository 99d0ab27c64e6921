#include "incidence/counting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "incidence/pyth.hpp"
#include "incidence/rng.hpp"

namespace incidence::counting {

namespace {

bool all_lattice(const CircleFamily& family) {
    for (const auto& c : family.circles)
        if (!c.lattice) return false;
    return !family.circles.empty();
}

uint64_t pack_lattice(int64_t j, int64_t k, int64_t l) {
    constexpr int64_t off = int64_t{1} << 20;
    return (static_cast<uint64_t>(j + off) << 42) | (static_cast<uint64_t>(k + off) << 21) |
           static_cast<uint64_t>(l);
}

// Integer vectors (a, b, c) with a^2 + b^2 = c^2, 1 <= c <= c_max.
std::vector<std::array<int64_t, 3>> tangency_vectors(int64_t c_max) {
    std::vector<std::array<int64_t, 3>> vecs;
    for (int64_t c = 1; c <= c_max; ++c)
        for (int64_t a = -c; a <= c; ++a) {
            const int64_t b2 = c * c - a * a;
            const int64_t b = pyth::isqrt64(b2);
            if (b * b != b2) continue;
            vecs.push_back({a, b, c});
            if (b > 0) vecs.push_back({a, -b, c});
        }
    return vecs;
}

// Calls fn(i, j) once per unordered exactly-tangent lattice pair, probing
// the position set with the solution-vector list (partner always has the
// larger l, so each pair fires once).
template <typename Fn>
void for_lattice_tangent_pairs(const CircleFamily& family, Fn&& fn) {
    int64_t l_lo = std::numeric_limits<int64_t>::max(), l_hi = std::numeric_limits<int64_t>::min();
    std::unordered_map<uint64_t, uint32_t> where;
    where.reserve(family.circles.size() * 2);
    for (uint32_t i = 0; i < family.circles.size(); ++i) {
        const auto& [j, k, l] = *family.circles[i].lattice;
        l_lo = std::min(l_lo, l);
        l_hi = std::max(l_hi, l);
        where.emplace(pack_lattice(j, k, l), i);
    }
    if (l_hi <= l_lo) return;
    const auto vecs = tangency_vectors(l_hi - l_lo);
    for (uint32_t i = 0; i < family.circles.size(); ++i) {
        const auto& [j, k, l] = *family.circles[i].lattice;
        for (const auto& v : vecs) {
            if (l + v[2] > l_hi) break; // vectors sorted by c
            auto it = where.find(pack_lattice(j + v[0], k + v[1], l + v[2]));
            if (it != where.end()) fn(i, it->second);
        }
    }
}

} // namespace

int64_t count_exact_tangent_pairs(const CircleFamily& family, std::optional<double> tolerance) {
    if (all_lattice(family)) {
        int64_t count = 0;
        for_lattice_tangent_pairs(family, [&](uint32_t, uint32_t) { ++count; });
        return count;
    }
    if (!tolerance)
        throw ToleranceRequired("count_exact_tangent_pairs: non-lattice family needs a tolerance");
    return count_exact_tangent_pairs_brute(family, tolerance);
}

int64_t count_exact_tangent_pairs_brute(const CircleFamily& family, std::optional<double> tolerance) {
    const auto& cs = family.circles;
    int64_t count = 0;
    if (all_lattice(family)) {
        for (size_t i = 0; i < cs.size(); ++i)
            for (size_t j = i + 1; j < cs.size(); ++j)
                if (geom::lattice_exact_tangent(cs[i], cs[j])) ++count;
        return count;
    }
    if (!tolerance)
        throw ToleranceRequired("count_exact_tangent_pairs_brute: non-lattice family needs a tolerance");
    for (size_t i = 0; i < cs.size(); ++i)
        for (size_t j = i + 1; j < cs.size(); ++j)
            if (geom::pair_metrics(cs[i], cs[j]).delta_tan <= *tolerance) ++count;
    return count;
}

namespace {

struct CenterHash {
    double cell = 1.0;
    std::unordered_map<uint64_t, std::vector<uint32_t>> buckets;

    // Injective for |a|, |b| < 2^31, then mixed.
    static uint64_t key(int64_t a, int64_t b) {
        return mix64((static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) |
                     static_cast<uint64_t>(static_cast<uint32_t>(b)));
    }
    void insert(Vec2 p, uint32_t id) {
        buckets[key(static_cast<int64_t>(std::floor(p.x / cell)),
                    static_cast<int64_t>(std::floor(p.y / cell)))]
            .push_back(id);
    }

    // Visits circles in cells meeting the ring dist(center, p) in [r1, r2].
    template <typename Fn>
    void for_ring(Vec2 p, double r1, double r2, Fn&& fn) const {
        const double pad = cell * 0.7071067811865476;
        const double lo = std::max(0.0, r1 - pad), hi = r2 + pad;
        const int64_t iy0 = static_cast<int64_t>(std::floor((p.y - hi) / cell));
        const int64_t iy1 = static_cast<int64_t>(std::floor((p.y + hi) / cell));
        for (int64_t iy = iy0; iy <= iy1; ++iy) {
            const double ymid = (static_cast<double>(iy) + 0.5) * cell;
            const double dy = std::max(0.0, std::abs(ymid - p.y) - cell * 0.5);
            const double dy_far = std::abs(ymid - p.y) + cell * 0.5;
            if (dy > hi) continue;
            const double xspan = std::sqrt(std::max(0.0, hi * hi - dy * dy));
            double xin = 0.0;
            if (dy_far < lo) xin = std::sqrt(lo * lo - dy_far * dy_far);
            const int64_t run[2][2] = {
                {static_cast<int64_t>(std::floor((p.x - xspan) / cell)),
                 static_cast<int64_t>(std::floor((p.x - xin) / cell))},
                {static_cast<int64_t>(std::floor((p.x + xin) / cell)),
                 static_cast<int64_t>(std::floor((p.x + xspan) / cell))}};
            const bool merged = run[0][1] + 1 >= run[1][0];
            for (int s = 0; s < (merged ? 1 : 2); ++s) {
                const int64_t a = run[s][0];
                const int64_t b = merged ? run[1][1] : run[s][1];
                for (int64_t ix = a; ix <= b; ++ix) {
                    auto it = buckets.find(key(ix, iy));
                    if (it == buckets.end()) continue;
                    for (uint32_t id : it->second) fn(id);
                }
            }
        }
    }
};

} // namespace

int64_t count_delta_tangent_pairs(const CircleFamily& family, double delta_frac, double d_lo,
                                  double d_hi) {
    if (!(delta_frac > 0.0)) throw std::invalid_argument("count_delta_tangent_pairs: delta_frac > 0");
    const auto& cs = family.circles;
    const double eps = delta_frac * family.delta;
    const double w = std::max(family.delta, 1e-9);

    // Radius buckets of width w, each with its own center hash.
    std::unordered_map<int64_t, std::vector<uint32_t>> by_radius;
    for (uint32_t i = 0; i < cs.size(); ++i)
        by_radius[static_cast<int64_t>(std::floor(cs[i].radius / w))].push_back(i);
    std::unordered_map<int64_t, CenterHash> hashes;
    for (auto& [rb, ids] : by_radius) {
        CenterHash& h = hashes[rb];
        h.cell = w;
        for (uint32_t id : ids) h.insert(cs[id].center, id);
    }

    int64_t count = 0;
    for (uint32_t i = 0; i < cs.size(); ++i) {
        const Circle& ci = cs[i];
        const int64_t rb_i = static_cast<int64_t>(std::floor(ci.radius / w));
        for (auto& [rb, hash] : hashes) {
            if (rb < rb_i) continue;
            // Radii gap range across the two buckets.
            const double gap_lo = std::max(0.0, static_cast<double>(rb - rb_i - 1) * w);
            const double gap_hi = static_cast<double>(rb - rb_i + 1) * w;
            // Near-tangency forces d ~ 2 gap; prune buckets outside the window.
            if (2.0 * gap_hi + eps < d_lo || gap_lo - eps > d_hi) continue;
            hash.for_ring(ci.center, std::max(0.0, gap_lo - eps), gap_hi + eps, [&](uint32_t j) {
                if (rb == rb_i && j <= i) return;
                const auto m = geom::pair_metrics(ci, cs[j]);
                if (m.delta_tan < eps && m.dist >= d_lo && m.dist <= d_hi) ++count;
            });
        }
    }
    return count;
}

int64_t count_delta_tangent_pairs_brute(const CircleFamily& family, double delta_frac, double d_lo,
                                        double d_hi) {
    const auto& cs = family.circles;
    const double eps = delta_frac * family.delta;
    int64_t count = 0;
    for (size_t i = 0; i < cs.size(); ++i)
        for (size_t j = i + 1; j < cs.size(); ++j) {
            const auto m = geom::pair_metrics(cs[i], cs[j]);
            if (m.delta_tan < eps && m.dist >= d_lo && m.dist <= d_hi) ++count;
        }
    return count;
}

uint32_t MultiplicityGrid::max_count() const {
    uint32_t best = 0;
    for (uint32_t c : counts) best = std::max(best, c);
    return best;
}

MultiplicityGrid multiplicity_grid(const CircleFamily& family, double delta, double spacing,
                                   const Window2& window) {
    if (!(spacing > 0.0 && spacing <= delta / 2.0))
        throw std::invalid_argument("multiplicity_grid: need 0 < spacing <= delta/2");
    MultiplicityGrid grid;
    grid.origin = window.lo;
    grid.spacing = spacing;
    grid.delta = delta;
    grid.nx = static_cast<int>(std::floor((window.hi.x - window.lo.x) / spacing)) + 1;
    grid.ny = static_cast<int>(std::floor((window.hi.y - window.lo.y) / spacing)) + 1;
    if (grid.nx <= 0 || grid.ny <= 0) throw std::invalid_argument("multiplicity_grid: empty window");
    grid.counts.assign(static_cast<size_t>(grid.nx) * grid.ny, 0);

    for (const Circle& c : family.circles) {
        const double r_out = c.radius + delta;
        const int iy0 = std::max(0, static_cast<int>(std::ceil((c.center.y - r_out - window.lo.y) / spacing)));
        const int iy1 = std::min(grid.ny - 1,
                                 static_cast<int>(std::floor((c.center.y + r_out - window.lo.y) / spacing)));
        for (int iy = iy0; iy <= iy1; ++iy) {
            const double dy = window.lo.y + iy * spacing - c.center.y;
            const double out2 = r_out * r_out - dy * dy;
            if (out2 < 0.0) continue;
            const double xo = std::sqrt(out2);
            const double r_in = c.radius - delta;
            const double in2 = r_in > 0.0 ? r_in * r_in - dy * dy : -1.0;
            const double xi = in2 > 0.0 ? std::sqrt(in2) : 0.0;
            // Candidate spans, verified with the exact per-point test.
            const double spans[2][2] = {{c.center.x - xo, c.center.x - xi},
                                        {c.center.x + xi, c.center.x + xo}};
            const int nspan = (xi == 0.0) ? 1 : 2;
            const double sp0[2] = {spans[0][0], nspan == 1 ? spans[1][1] : spans[0][1]};
            for (int s = 0; s < nspan; ++s) {
                const double lo = (s == 0) ? sp0[0] : spans[1][0];
                const double hi = (s == 0) ? sp0[1] : spans[1][1];
                int ix0 = std::max(0, static_cast<int>(std::ceil((lo - window.lo.x) / spacing)) - 1);
                int ix1 = std::min(grid.nx - 1, static_cast<int>(std::floor((hi - window.lo.x) / spacing)) + 1);
                for (int ix = ix0; ix <= ix1; ++ix) {
                    const Vec2 p = grid.point(ix, iy);
                    if (std::abs(geom::norm(p - c.center) - c.radius) <= delta)
                        grid.counts[static_cast<size_t>(iy) * grid.nx + ix]++;
                }
            }
        }
    }
    return grid;
}

namespace {

struct ArcInterval {
    double lo = 0.0, hi = 0.0; // global angles, lo <= hi, may exceed pi
};

// Angular sublevel set { th : | |c.point(th) - y| - s | <= slack } as 0-2
// intervals; full circle reported via the flag.
struct ArcCover {
    bool full = false;
    int n = 0;
    ArcInterval arcs[2];
};

ArcCover annulus_trace(const Circle& on, const Circle& other, double slack) {
    ArcCover cover;
    const double r = on.radius, s = other.radius;
    const double D = geom::norm(other.center - on.center);
    if (D < 1e-15) {
        if (std::abs(r - s) <= slack) cover.full = true;
        return cover;
    }
    const double hi = s + slack, lo = std::max(0.0, s - slack);
    if (std::abs(r - D) > hi || r + D < lo) return cover; // ranges disjoint
    const double axis = std::atan2(other.center.y - on.center.y, other.center.x - on.center.x);
    const double u_min = std::clamp((r * r + D * D - hi * hi) / (2.0 * r * D), -1.0, 1.0);
    const double u_max = std::clamp((r * r + D * D - lo * lo) / (2.0 * r * D), -1.0, 1.0);
    double phi_lo = std::acos(u_max), phi_hi = std::acos(u_min);
    if (phi_hi < phi_lo) std::swap(phi_lo, phi_hi);
    constexpr double tol = 1e-14;
    const bool at_zero = phi_lo <= tol, at_pi = phi_hi >= M_PI - tol;
    if (at_zero && at_pi) {
        cover.full = true;
    } else if (at_zero) {
        cover.n = 1;
        cover.arcs[0] = {axis - phi_hi, axis + phi_hi};
    } else if (at_pi) {
        cover.n = 1;
        cover.arcs[0] = {axis + phi_lo, axis + 2.0 * M_PI - phi_lo};
    } else {
        cover.n = 2;
        cover.arcs[0] = {axis + phi_lo, axis + phi_hi};
        cover.arcs[1] = {axis - phi_hi, axis - phi_lo};
    }
    return cover;
}

} // namespace

double high_multiplicity_fraction(const Circle& c, const CircleFamily& family, double delta,
                                  double threshold, std::optional<EpsTBucket> restrict_bucket) {
    if (!(threshold > 0.0)) throw std::invalid_argument("high_multiplicity_fraction: threshold > 0");
    if (!(delta > 0.0)) throw std::invalid_argument("high_multiplicity_fraction: delta > 0");
    const int m = std::max<int>(16, static_cast<int>(std::ceil(2.0 * M_PI * c.radius / (delta / 4.0))));
    std::vector<int32_t> diff(static_cast<size_t>(m) + 1, 0);
    int32_t base_add = 0;
    const double step = 2.0 * M_PI / static_cast<double>(m);

    auto stamp = [&](double lo, double hi) {
        // Samples th_i = i*step with th in [lo, hi]; wraps mod 2*pi.
        const int64_t i0 = static_cast<int64_t>(std::ceil(lo / step - 1e-12));
        const int64_t i1 = static_cast<int64_t>(std::floor(hi / step + 1e-12));
        if (i1 < i0) return;
        if (i1 - i0 + 1 >= m) {
            ++base_add;
            return;
        }
        const int64_t a = ((i0 % m) + m) % m;
        const int64_t b = ((i1 % m) + m) % m;
        if (a <= b) {
            diff[a] += 1;
            diff[b + 1] -= 1;
        } else {
            diff[a] += 1;
            diff[m] -= 1;
            diff[0] += 1;
            diff[b + 1] -= 1;
        }
    };

    for (const Circle& member : family.circles) {
        if (restrict_bucket) {
            const auto pm = geom::pair_metrics(c, member);
            const double eps = restrict_bucket->eps, t = restrict_bucket->t;
            if (!(pm.delta_tan >= eps - family.delta - geom::kUnitTol &&
                  pm.delta_tan <= 2.0 * eps + geom::kUnitTol && pm.dist >= t / 2.0 - geom::kUnitTol &&
                  pm.dist <= t + geom::kUnitTol && geom::annuli_intersect(c, member, family.delta)))
                continue;
        }
        const ArcCover cover = annulus_trace(c, member, delta);
        if (cover.full) {
            ++base_add;
            continue;
        }
        for (int a = 0; a < cover.n; ++a) stamp(cover.arcs[a].lo, cover.arcs[a].hi);
    }

    int64_t above = 0;
    int32_t run = 0;
    for (int i = 0; i < m; ++i) {
        run += diff[i];
        if (static_cast<double>(run + base_add) > threshold) ++above;
    }
    return static_cast<double>(above) / static_cast<double>(m);
}

double wolff_bound(int64_t m, int64_t n, int64_t mu, int64_t nu, double eps, double C_eps) {
    if (m < 1 || n < 1 || mu < 1 || nu < 1) throw std::invalid_argument("wolff_bound: counts must be >= 1");
    const double mn = static_cast<double>(m) * static_cast<double>(n);
    const double ratio = mn / (static_cast<double>(mu) * static_cast<double>(nu));
    return C_eps * std::pow(mn, eps) *
           (std::pow(ratio, 0.75) + static_cast<double>(m) / static_cast<double>(mu) +
            static_cast<double>(n) / static_cast<double>(nu));
}

NeighborhoodCount neighborhood_intersection_count(const CircleFamily& family, const Circle& c1,
                                                  const Circle& c2, double eps, double t) {
    if (!(eps >= family.delta)) throw std::invalid_argument("neighborhood_intersection_count: eps >= delta");
    const double delta = family.delta;
    auto in_neighborhood = [&](const Circle& base, const Circle& m) {
        const auto pm = geom::pair_metrics(base, m);
        return pm.delta_tan >= eps - delta - geom::kUnitTol && pm.delta_tan <= 2.0 * eps + geom::kUnitTol &&
               pm.dist >= t / 2.0 - geom::kUnitTol && pm.dist <= t + geom::kUnitTol &&
               geom::annuli_intersect(base, m, delta);
    };
    NeighborhoodCount out;
    for (const Circle& m : family.circles)
        if (in_neighborhood(c1, m) && in_neighborhood(c2, m)) ++out.count;

    const auto pm = geom::pair_metrics(c1, c2);
    const double beta = pm.delta_tan, tau = pm.dist;
    const double arm1 = std::sqrt(eps / tau);
    const double arm2 = beta > 0.0 ? eps / std::sqrt(beta * tau) : std::numeric_limits<double>::infinity();
    out.bound = (eps * t * t / (delta * delta * delta)) * std::min(arm1, arm2);
    return out;
}

int64_t mu_fold_points(const CircleFamily& family, int64_t mu) {
    if (mu < 1) throw std::invalid_argument("mu_fold_points: mu must be >= 1");
    if (!all_lattice(family))
        throw std::invalid_argument("mu_fold_points: exact clustering needs a lattice family");

    struct Record {
        int64_t nx, ny, den, dx, dy;
        uint32_t id;
        bool operator<(const Record& o) const {
            return std::tie(nx, ny, den, dx, dy, id) < std::tie(o.nx, o.ny, o.den, o.dx, o.dy, o.id);
        }
        bool same_key(const Record& o) const {
            return std::tie(nx, ny, den, dx, dy) == std::tie(o.nx, o.ny, o.den, o.dx, o.dy);
        }
    };
    std::vector<Record> records;

    for_lattice_tangent_pairs(family, [&](uint32_t i, uint32_t j) {
        // Partner j has the larger l by construction of the probe vectors.
        const auto& [jp, kp, lp] = *family.circles[i].lattice;
        const auto& [jq, kq, lq] = *family.circles[j].lattice;
        const int64_t den = lq - lp;
        // Tangency point T = x_q + l_q (x_p - x_q) / (l_q - l_p), exact.
        int64_t nx = jq * den + lq * (jp - jq);
        int64_t ny = kq * den + lq * (kp - kq);
        int64_t d = den;
        const int64_t g = std::gcd(std::gcd(std::abs(nx), std::abs(ny)), d);
        nx /= g;
        ny /= g;
        d /= g;
        // Center line through T has direction x_p - x_q.
        int64_t dx = jp - jq, dy = kp - kq;
        const int64_t g2 = std::gcd(std::abs(dx), std::abs(dy));
        dx /= g2;
        dy /= g2;
        if (dx < 0 || (dx == 0 && dy < 0)) {
            dx = -dx;
            dy = -dy;
        }
        records.push_back({nx, ny, d, dx, dy, i});
        records.push_back({nx, ny, d, dx, dy, j});
    });

    std::sort(records.begin(), records.end());
    records.erase(std::unique(records.begin(), records.end(),
                              [](const Record& a, const Record& b) {
                                  return a.same_key(b) && a.id == b.id;
                              }),
                  records.end());

    int64_t points = 0;
    size_t i = 0;
    while (i < records.size()) {
        size_t j = i;
        while (j < records.size() && records[j].same_key(records[i])) ++j;
        const int64_t circles_on_line = static_cast<int64_t>(j - i);
        if (circles_on_line >= mu && circles_on_line <= 10 * mu) ++points;
        i = j;
    }
    return points;
}

VolumeEstimate three_circle_set_volume(const Circle& c1, const Circle& c2, const Circle& c3,
                                       double eps, double t, double lam, int64_t trials,
                                       uint64_t seed, double a0) {
    if (trials < 10000) throw std::invalid_argument("three_circle_set_volume: trials >= 10^4");
    if (a0 * eps > t * lam * lam)
        throw HypothesisViolated("three_circle_set_volume: need a0*eps <= t*lam^2");
    const Circle* cs[3] = {&c1, &c2, &c3};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (geom::pair_metrics(*cs[i], *cs[j]).dist < geom::kUnitTol)
                throw std::invalid_argument("three_circle_set_volume: coincident input circles");

    // Sampling box in (center, radius) space; covers every circle tangent to
    // inputs inside the unit box.
    const double x_lo = -4.0, x_hi = 4.0, r_hi = 8.0;
    const double box_volume = (x_hi - x_lo) * (x_hi - x_lo) * r_hi;

    int64_t hits = 0;
    for (int64_t trial = 0; trial < trials; ++trial) {
        const double x = x_lo + (x_hi - x_lo) * keyed_unit(seed, 21, static_cast<uint64_t>(trial) * 3);
        const double y = x_lo + (x_hi - x_lo) * keyed_unit(seed, 21, static_cast<uint64_t>(trial) * 3 + 1);
        const double r = r_hi * keyed_unit(seed, 21, static_cast<uint64_t>(trial) * 3 + 2);
        if (r <= 0.0) continue;
        const Circle cand({x, y}, r);

        bool ok = true;
        ArcCover covers[3];
        for (int i = 0; ok && i < 3; ++i) {
            const auto pm = geom::pair_metrics(cand, *cs[i]);
            if (!(pm.delta_tan < eps && pm.dist > t && geom::annuli_intersect(cand, *cs[i], eps))) {
                ok = false;
                break;
            }
            covers[i] = annulus_trace(cand, *cs[i], 2.0 * eps);
            if (covers[i].full || covers[i].n == 0) ok = false; // degenerate trace
        }
        if (!ok) continue;

        // Pairwise separation of the intersection lobes, measured through
        // the angular gaps (chord minus the 2*eps fattening on both sides).
        auto gap_dist = [&](const ArcInterval& a, const ArcInterval& b) {
            auto wrap = [](double v) {
                v = std::fmod(v, 2.0 * M_PI);
                if (v < 0.0) v += 2.0 * M_PI;
                return v;
            };
            // Disjoint arcs satisfy lenA + d0 + lenB + d1 = 2*pi.
            const double a_len = a.hi - a.lo, b_len = b.hi - b.lo;
            const double d0 = wrap(b.lo - a.hi);
            const double d1 = wrap(a.lo - b.hi);
            if (a_len + b_len + d0 + d1 > 2.0 * M_PI + 1e-9) return 0.0; // overlap
            double gap = std::min(d0, d1);
            if (gap > M_PI) gap = M_PI;
            return std::max(0.0, 2.0 * r * std::sin(gap / 2.0) - 4.0 * eps);
        };
        for (int i = 0; ok && i < 3; ++i)
            for (int j = i + 1; ok && j < 3; ++j) {
                double closest = std::numeric_limits<double>::infinity();
                for (int ai = 0; ai < covers[i].n; ++ai)
                    for (int aj = 0; aj < covers[j].n; ++aj)
                        closest = std::min(closest, gap_dist(covers[i].arcs[ai], covers[j].arcs[aj]));
                if (!(closest >= lam)) ok = false;
            }
        if (ok) ++hits;
    }

    VolumeEstimate out;
    out.hits = hits;
    out.trials = trials;
    const double p = static_cast<double>(hits) / static_cast<double>(trials);
    out.estimate = box_volume * p;
    out.std_error = box_volume * std::sqrt(std::max(0.0, p * (1.0 - p) / static_cast<double>(trials)));
    out.bound = (eps * eps * eps) / (lam * lam * lam);
    return out;
}

IncidenceReport incidence_report(const CircleFamily& family,
                                 const std::vector<RectangleTypeRecord>& rectangles) {
    const auto t0 = std::chrono::steady_clock::now();
    IncidenceReport report;
    switch (family.kind) {
        case families::FamilyKind::Lattice: report.family_kind = "Lattice"; break;
        case families::FamilyKind::DeltaNet: report.family_kind = "DeltaNet"; break;
        case families::FamilyKind::RadiiSeparatedNet: report.family_kind = "RadiiSeparatedNet"; break;
        case families::FamilyKind::Knapp: report.family_kind = "Knapp"; break;
        case families::FamilyKind::Thinned: report.family_kind = "Thinned"; break;
        case families::FamilyKind::Custom: report.family_kind = "Custom"; break;
    }
    report.delta = family.delta;
    report.family_size = family.size();
    report.buckets = bucketed_pair_counts(family);
    for (const auto& r : rectangles) {
        report.rectangle_types[{r.mu, r.nu}]++;
        const int tlev = static_cast<int>(std::lround(std::log2(r.rectangle.t)));
        report.rectangles_by_t[tlev]++;
        auto& peak = report.peak_type_by_t[tlev];
        peak.first = std::max(peak.first, r.mu);
        peak.second = std::max(peak.second, r.nu);
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.pairs_per_second =
        report.wall_seconds > 0.0 ? static_cast<double>(report.buckets.total) / report.wall_seconds : 0.0;
    return report;
}

BucketedPairs bucketed_pair_counts(const CircleFamily& family) {
    const auto& cs = family.circles;
    if (cs.size() > 40000) throw std::invalid_argument("bucketed_pair_counts: family too large");
    BucketedPairs out;
    const double delta = family.delta > 0.0 ? family.delta : 1e-9;
    for (size_t i = 0; i < cs.size(); ++i)
        for (size_t j = i + 1; j < cs.size(); ++j) {
            const auto pm = geom::pair_metrics(cs[i], cs[j]);
            // Smallest eps = delta * 2^je with defect <= 2 eps; then
            // eps - delta <= defect <= 2 eps holds.
            int je = 0;
            if (pm.delta_tan > 2.0 * delta)
                je = static_cast<int>(std::ceil(std::log2(pm.delta_tan / (2.0 * delta))));
            const int jt = static_cast<int>(std::ceil(std::log2(std::max(pm.dist, 1e-12))));
            out.counts[{je, jt}]++;
            out.total++;
        }
    return out;
}

namespace {

// 3D cell index over (center, radius) used to find circles tangent to a
// rectangle: a tangent circle passes within a1*delta of the arc-center
// point p, so its (y, s) lies on the cone shell | |p-y| - s | <= a1*delta.
struct TangencyIndex {
    double cell = 0.12;
    double r_min = std::numeric_limits<double>::infinity();
    double r_max = 0.0;
    std::unordered_map<uint64_t, std::vector<uint32_t>> buckets;

    // Injective for cell indices below 2^20 in magnitude, then mixed.
    static uint64_t key(int64_t a, int64_t b, int64_t c) {
        constexpr uint64_t mask = (uint64_t{1} << 21) - 1;
        return mix64(((static_cast<uint64_t>(a) & mask) << 42) |
                     ((static_cast<uint64_t>(b) & mask) << 21) |
                     (static_cast<uint64_t>(c) & mask));
    }

    void build(const std::vector<Circle>& cs) {
        for (uint32_t i = 0; i < cs.size(); ++i) {
            const Circle& c = cs[i];
            r_min = std::min(r_min, c.radius);
            r_max = std::max(r_max, c.radius);
            buckets[key(static_cast<int64_t>(std::floor(c.center.x / cell)),
                        static_cast<int64_t>(std::floor(c.center.y / cell)),
                        static_cast<int64_t>(std::floor(c.radius / cell)))]
                .push_back(i);
        }
    }

    // Centers of circles with | |p - y| - s | <= slack lie in the annulus
    // rho in [r_min - pad, r_max + pad] around p; each 2D cell meets only a
    // couple of admissible radius slabs.
    template <typename Fn>
    void for_shell(Vec2 p, double slack, Fn&& fn) const {
        const double pad = cell * 1.42 + slack;
        const double reach = r_max + pad;
        const int64_t ix0 = static_cast<int64_t>(std::floor((p.x - reach) / cell));
        const int64_t ix1 = static_cast<int64_t>(std::floor((p.x + reach) / cell));
        const int64_t iy0 = static_cast<int64_t>(std::floor((p.y - reach) / cell));
        const int64_t iy1 = static_cast<int64_t>(std::floor((p.y + reach) / cell));
        for (int64_t iy = iy0; iy <= iy1; ++iy)
            for (int64_t ix = ix0; ix <= ix1; ++ix) {
                const double cx = (static_cast<double>(ix) + 0.5) * cell;
                const double cy = (static_cast<double>(iy) + 0.5) * cell;
                const double rho = std::hypot(cx - p.x, cy - p.y);
                if (rho > r_max + pad || rho < r_min - pad) continue;
                const int64_t ir0 = static_cast<int64_t>(std::floor(std::max(0.0, rho - pad) / cell));
                const int64_t ir1 = static_cast<int64_t>(std::floor((rho + pad) / cell));
                for (int64_t ir = ir0; ir <= ir1; ++ir) {
                    auto it = buckets.find(key(ix, iy, ir));
                    if (it == buckets.end()) continue;
                    for (uint32_t id : it->second) fn(id);
                }
            }
    }
};

} // namespace

std::vector<RectangleTypeRecord> type_rectangles(const CircleFamily& white,
                                                 const CircleFamily& black, double t, double delta,
                                                 TypeRectangleMode mode) {
    if (!(delta > 0.0 && delta <= t)) throw std::invalid_argument("type_rectangles: need 0 < delta <= t");
    const auto& ws = white.circles;
    const auto& bs = black.circles;

    // Candidate rectangles from every delta-tangent cross pair, reduced to
    // their core (delta, t) form: the cover inflates widths to honor the
    // containment contract, but sites, comparability, and tangency counts
    // are all resolved at the family scale.
    std::vector<TangencyRectangle> cands;
    for (const Circle& w : ws)
        for (const Circle& b : bs) {
            if (!geom::is_delta_tangent(w, b, delta)) continue;
            try {
                for (auto& r : geom::cover_intersection_rectangles(w, b, delta)) {
                    r.delta = delta;
                    cands.push_back(r);
                }
            } catch (const std::domain_error&) {
                // degenerate pair; skip
            }
        }
    if (cands.empty()) return {};

    // Combined index of both families for the tangency counts.
    std::vector<Circle> all;
    all.reserve(ws.size() + bs.size());
    all.insert(all.end(), ws.begin(), ws.end());
    all.insert(all.end(), bs.begin(), bs.end());
    TangencyIndex index;
    index.cell = std::max(0.12, 4.0 * delta);
    index.build(all);

    const double a1 = geom::kDefaultA1;
    std::vector<uint32_t> mus(cands.size(), 0), nus(cands.size(), 0);
    std::vector<uint32_t> stamp(all.size(), 0);
    uint32_t generation = 0;
    for (size_t ci = 0; ci < cands.size(); ++ci) {
        const TangencyRectangle& rect = cands[ci];
        const Vec2 p = rect.arc_center_point();
        const Vec2 e0 = rect.base.point_at(rect.arc_center_angle - rect.half_angle());
        const Vec2 e1 = rect.base.point_at(rect.arc_center_angle + rect.half_angle());
        const double slack = a1 * rect.delta + geom::kUnitTol;
        ++generation;
        auto consider = [&](uint32_t id) {
            if (stamp[id] == generation) return;
            stamp[id] = generation;
            const Circle& c = all[id];
            // Three-point necessary condition before the sampled test.
            if (std::abs(geom::norm(p - c.center) - c.radius) > slack) return;
            if (std::abs(geom::norm(e0 - c.center) - c.radius) > slack) return;
            if (std::abs(geom::norm(e1 - c.center) - c.radius) > slack) return;
            if (!geom::circle_tangent_to_rectangle(c, rect, a1)) return;
            if (id < ws.size())
                ++mus[ci];
            else
                ++nus[ci];
        };
        // Wide rectangles (inflated covers) defeat the shell query; scan
        // directly instead.
        if (slack <= 2.0 * index.cell) {
            index.for_shell(p, slack, consider);
        } else {
            for (uint32_t id = 0; id < all.size(); ++id) consider(id);
        }
    }

    // Greedy pairwise-incomparable reduction: descending mu+nu, ties by
    // angle then base center; accepted rectangles bucketed by arc center.
    std::vector<uint32_t> order(cands.size());
    for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        const uint64_t ta = mus[a] + nus[a], tb = mus[b] + nus[b];
        if (ta != tb) return ta > tb;
        if (cands[a].arc_center_angle != cands[b].arc_center_angle)
            return cands[a].arc_center_angle < cands[b].arc_center_angle;
        if (cands[a].base.center.x != cands[b].base.center.x)
            return cands[a].base.center.x < cands[b].base.center.x;
        return cands[a].base.center.y < cands[b].base.center.y;
    });

    double max_window = 0.0;
    for (const auto& r : cands) max_window = std::max(max_window, std::sqrt(geom::kDefaultA0 * r.delta / r.t));
    const double bucket_cell = 2.0 * max_window + 8.0 * delta;
    std::unordered_map<uint64_t, std::vector<uint32_t>> accepted_cells;
    std::vector<uint32_t> accepted;
    auto cell_key = [&](Vec2 q, int tlev) {
        return TangencyIndex::key(static_cast<int64_t>(std::floor(q.x / bucket_cell)),
                                  static_cast<int64_t>(std::floor(q.y / bucket_cell)),
                                  tlev);
    };
    for (uint32_t id : order) {
        const TangencyRectangle& rect = cands[id];
        const Vec2 q = rect.arc_center_point();
        const int tlev = static_cast<int>(std::lround(std::log2(rect.t)));
        bool incomparable = true;
        const int64_t qx = static_cast<int64_t>(std::floor(q.x / bucket_cell));
        const int64_t qy = static_cast<int64_t>(std::floor(q.y / bucket_cell));
        for (int64_t dx = -1; incomparable && dx <= 1; ++dx)
            for (int64_t dy = -1; incomparable && dy <= 1; ++dy) {
                auto it = accepted_cells.find(TangencyIndex::key(qx + dx, qy + dy, tlev));
                if (it == accepted_cells.end()) continue;
                for (uint32_t aid : it->second)
                    if (geom::rectangles_comparable(rect, cands[aid])) {
                        incomparable = false;
                        break;
                    }
            }
        if (!incomparable) continue;
        accepted_cells[cell_key(q, tlev)].push_back(id);
        accepted.push_back(id);
    }

    std::vector<RectangleTypeRecord> out;
    out.reserve(accepted.size());
    for (uint32_t id : accepted) {
        if (mode.good_only) {
            const double a2 = mode.A * mode.A;
            if (!(mus[id] >= 1 && nus[id] >= 1 && mus[id] < a2 && nus[id] < a2)) continue;
        }
        out.push_back({cands[id], mus[id], nus[id]});
    }
    return out;
}

} // namespace incidence::counting
