#include "incidence/families.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "incidence/rng.hpp"

namespace incidence::families {

namespace {

// Open-addressed bucket map over integer 3D cells.
struct CellHash {
    double cell = 1.0;
    std::unordered_map<uint64_t, std::vector<uint32_t>> buckets;

    // Injective for cell indices below 2^20 in magnitude, then mixed.
    static uint64_t key(int64_t a, int64_t b, int64_t c) {
        constexpr uint64_t mask = (uint64_t{1} << 21) - 1;
        return mix64(((static_cast<uint64_t>(a) & mask) << 42) |
                     ((static_cast<uint64_t>(b) & mask) << 21) |
                     (static_cast<uint64_t>(c) & mask));
    }

    std::array<int64_t, 3> cell_of(const Circle& c) const {
        return {static_cast<int64_t>(std::floor(c.center.x / cell)),
                static_cast<int64_t>(std::floor(c.center.y / cell)),
                static_cast<int64_t>(std::floor(c.radius / cell))};
    }

    void insert(const Circle& c, uint32_t id) {
        auto [a, b, r] = cell_of(c);
        buckets[key(a, b, r)].push_back(id);
    }

    template <typename Fn>
    void for_neighbors(const Circle& c, Fn&& fn) const {
        auto [a, b, r] = cell_of(c);
        for (int64_t da = -1; da <= 1; ++da)
            for (int64_t db = -1; db <= 1; ++db)
                for (int64_t dr = -1; dr <= 1; ++dr) {
                    auto it = buckets.find(key(a + da, b + db, r + dr));
                    if (it == buckets.end()) continue;
                    for (uint32_t id : it->second) fn(id);
                }
    }
};

} // namespace

CircleFamily lattice_family(int64_t N) {
    if (N < 2) throw std::invalid_argument("lattice_family: N must be >= 2");
    const double delta = 1.0 / static_cast<double>(N);
    const int64_t l_lo = (N + 1) / 2;
    CircleFamily fam;
    fam.delta = delta;
    fam.kind = FamilyKind::Lattice;
    fam.box = {delta, 1.0, delta, 1.0, static_cast<double>(l_lo) * delta, 1.0};
    fam.circles.reserve(static_cast<size_t>(N * N * (N - l_lo + 1)));
    for (int64_t j = 1; j <= N; ++j)
        for (int64_t k = 1; k <= N; ++k)
            for (int64_t l = l_lo; l <= N; ++l)
                fam.circles.push_back(geom::lattice_circle(j, k, l, delta));
    return fam;
}

CircleFamily delta_net_family(double delta, const Box3& box, NetMode mode, uint64_t seed) {
    if (!(delta > 0.0 && delta < 0.25))
        throw std::invalid_argument("delta_net_family: need 0 < delta < 1/4");
    if (!(box.r_lo > 0.0)) throw std::invalid_argument("delta_net_family: radii must stay positive");

    CircleFamily fam;
    fam.delta = delta;
    fam.box = box;
    fam.seed = seed;
    CounterRng rng(seed, 0);

    const double h = delta / 2.0;
    auto grid_count = [&](double span) { return std::max<int64_t>(1, static_cast<int64_t>(span / h)); };
    auto grid_value = [&](double lo, double span, int64_t n, int64_t i) {
        return n == 1 ? lo + span / 2.0 : lo + (static_cast<double>(i) + 0.5) * (span / static_cast<double>(n));
    };

    if (mode == NetMode::RadiiSeparation) {
        fam.kind = FamilyKind::RadiiSeparatedNet;
        const int64_t nr = grid_count(box.span_r());
        std::vector<int64_t> order(nr);
        for (int64_t i = 0; i < nr; ++i) order[i] = i;
        seeded_shuffle(order, rng);
        std::vector<double> kept;
        for (int64_t i : order) {
            const double r = grid_value(box.r_lo, box.span_r(), nr, i);
            bool ok = true;
            for (double k : kept)
                if (std::abs(k - r) < delta) { ok = false; break; }
            if (ok) kept.push_back(r);
        }
        std::sort(kept.begin(), kept.end());
        for (double r : kept) {
            const double x = rng.next_range(box.x_lo, box.x_hi);
            const double y = rng.next_range(box.y_lo, box.y_hi);
            fam.circles.push_back(Circle({x, y}, r));
        }
        return fam;
    }

    fam.kind = FamilyKind::DeltaNet;
    const int64_t nx = grid_count(box.span_x());
    const int64_t ny = grid_count(box.span_y());
    const int64_t nr = grid_count(box.span_r());
    std::vector<uint64_t> order(static_cast<size_t>(nx * ny * nr));
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    seeded_shuffle(order, rng);

    CellHash hash;
    hash.cell = delta;
    for (uint64_t idx : order) {
        const int64_t ir = static_cast<int64_t>(idx % nr);
        const int64_t iy = static_cast<int64_t>((idx / nr) % ny);
        const int64_t ix = static_cast<int64_t>(idx / (nr * ny));
        Circle cand({grid_value(box.x_lo, box.span_x(), nx, ix), grid_value(box.y_lo, box.span_y(), ny, iy)},
                    grid_value(box.r_lo, box.span_r(), nr, ir));
        bool ok = true;
        hash.for_neighbors(cand, [&](uint32_t id) {
            if (ok && circle_space_dist(cand, fam.circles[id]) <= delta) ok = false;
        });
        if (ok) {
            hash.insert(cand, static_cast<uint32_t>(fam.circles.size()));
            fam.circles.push_back(cand);
        }
    }
    return fam;
}

CircleFamily knapp_family(double delta) {
    if (!(delta > 0.0 && delta < 1.0 / 16.0))
        throw std::invalid_argument("knapp_family: need 0 < delta < 1/16");
    CircleFamily fam;
    fam.delta = delta;
    fam.kind = FamilyKind::Knapp;
    fam.box = {-2.0, 2.0, -2.0, 2.0, 1.0, 2.0};
    const int64_t n_r = static_cast<int64_t>(1.0 / delta);
    const int64_t n_th = static_cast<int64_t>(std::sqrt(delta) / delta);
    for (int64_t i = 0; i < n_r; ++i) {
        const double r = 1.0 + static_cast<double>(i) * delta;
        for (int64_t j = 0; j <= n_th; ++j) {
            const double th = static_cast<double>(j) * delta;
            fam.circles.push_back(Circle({r * std::cos(th), r * std::sin(th)}, r));
        }
    }
    return fam;
}

namespace {

struct CellGrid {
    // Cell partition used by the jittered nets: spacing 5/4 delta, jitter
    // <= delta/16, so distinct cells give pairwise d >= 9/8 delta > delta.
    double delta;
    Box3 box;
    int64_t nx, ny, nr;
    double sx, sy, sr;

    CellGrid(double d, const Box3& b) : delta(d), box(b) {
        const double a = 1.25 * d;
        nx = std::max<int64_t>(1, static_cast<int64_t>(b.span_x() / a));
        ny = std::max<int64_t>(1, static_cast<int64_t>(b.span_y() / a));
        nr = std::max<int64_t>(1, static_cast<int64_t>(b.span_r() / a));
        sx = b.span_x() / static_cast<double>(nx);
        sy = b.span_y() / static_cast<double>(ny);
        sr = b.span_r() / static_cast<double>(nr);
    }

    int64_t cells() const { return nx * ny * nr; }

    Circle circle_at(int64_t idx, uint64_t net_seed) const {
        const int64_t ir = idx % nr;
        const int64_t iy = (idx / nr) % ny;
        const int64_t ix = idx / (nr * ny);
        auto jitter = [&](int axis) {
            return (keyed_unit(net_seed, 7, static_cast<uint64_t>(idx) * 3 + axis) - 0.5) * (delta / 8.0);
        };
        const double x = box.x_lo + (static_cast<double>(ix) + 0.5) * sx + jitter(0);
        const double y = box.y_lo + (static_cast<double>(iy) + 0.5) * sy + jitter(1);
        const double r = box.r_lo + (static_cast<double>(ir) + 0.5) * sr + jitter(2);
        return Circle({x, y}, r);
    }
};

} // namespace

CircleFamily cell_net_family(double delta, const Box3& box, uint64_t seed) {
    if (!(delta > 0.0 && delta < 0.25)) throw std::invalid_argument("cell_net_family: need 0 < delta < 1/4");
    CellGrid grid(delta, box);
    CircleFamily fam;
    fam.delta = delta;
    fam.kind = FamilyKind::DeltaNet;
    fam.box = box;
    fam.seed = seed;
    fam.circles.reserve(static_cast<size_t>(grid.cells()));
    for (int64_t i = 0; i < grid.cells(); ++i) fam.circles.push_back(grid.circle_at(i, seed));
    return fam;
}

CircleFamily thinned_cell_net(double delta, const Box3& box, double p, uint64_t net_seed,
                              uint64_t thin_seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("thinned_cell_net: p must be in [0,1]");
    CellGrid grid(delta, box);
    CircleFamily fam;
    fam.delta = delta;
    fam.kind = FamilyKind::Thinned;
    fam.box = box;
    fam.seed = thin_seed;
    for (int64_t i = 0; i < grid.cells(); ++i)
        if (keyed_unit(thin_seed, 11, static_cast<uint64_t>(i)) < p)
            fam.circles.push_back(grid.circle_at(i, net_seed));
    return fam;
}

bool validate_bipartite(const BipartitePair& pair) {
    const double t = pair.t;
    if (pair.white.circles.empty() || pair.black.circles.empty()) return false;
    for (const auto& w : pair.white.circles)
        for (const auto& b : pair.black.circles) {
            const double d = circle_space_dist(w, b);
            if (d < t || d > 100.0 * t) return false;
        }
    auto internal_ok = [&](const CircleFamily& f) {
        for (size_t i = 0; i < f.circles.size(); ++i)
            for (size_t j = i + 1; j < f.circles.size(); ++j)
                if (circle_space_dist(f.circles[i], f.circles[j]) > t) return false;
        return true;
    };
    return internal_ok(pair.white) && internal_ok(pair.black);
}

BipartitePair bipartite_split(const CircleFamily& family, double t) {
    if (family.circles.empty()) throw std::invalid_argument("bipartite_split: empty family");
    if (!(t > 0.0)) throw std::invalid_argument("bipartite_split: t must be positive");

    // Grid scan for balls of radius t/20 in (center, radius) space: bucket
    // members into cells of that size, treat each nonempty cell (center of
    // mass) as a candidate ball center.
    const double ball_r = t / 20.0;
    struct Cand {
        std::vector<uint32_t> members;
        double cx, cy, cr;
    };
    std::map<std::array<int64_t, 3>, Cand> cells;
    for (size_t i = 0; i < family.circles.size(); ++i) {
        const Circle& c = family.circles[i];
        std::array<int64_t, 3> key = {static_cast<int64_t>(std::floor(c.center.x / ball_r)),
                                      static_cast<int64_t>(std::floor(c.center.y / ball_r)),
                                      static_cast<int64_t>(std::floor(c.radius / ball_r))};
        auto& cand = cells[key];
        cand.members.push_back(static_cast<uint32_t>(i));
        cand.cx += c.center.x;
        cand.cy += c.center.y;
        cand.cr += c.radius;
    }
    std::vector<Cand> cands;
    cands.reserve(cells.size());
    for (auto& [key, cand] : cells) {
        const double n = static_cast<double>(cand.members.size());
        cand.cx /= n;
        cand.cy /= n;
        cand.cr /= n;
        cands.push_back(std::move(cand));
    }
    std::sort(cands.begin(), cands.end(),
              [](const Cand& a, const Cand& b) { return a.members.size() > b.members.size(); });
    if (cands.size() > 160) cands.resize(160); // densest candidates only

    auto build = [&](const Cand& a, const Cand& b) {
        BipartitePair pair;
        pair.t = t;
        // Members inside the ball of radius t/20 around the cell's center of
        // mass; cells only seed the scan.
        auto fill = [&](const Cand& c, CircleFamily& out) {
            out.delta = family.delta;
            out.kind = FamilyKind::Custom;
            out.box = family.box;
            for (const Circle& m : family.circles) {
                const double dx = m.center.x - c.cx, dy = m.center.y - c.cy, dr = m.radius - c.cr;
                if (dx * dx + dy * dy + dr * dr <= ball_r * ball_r) out.circles.push_back(m);
            }
        };
        fill(a, pair.white);
        fill(b, pair.black);
        return pair;
    };

    // Densest valid pair: maximize the smaller side, then the total.
    const size_t n = cands.size();
    std::vector<std::pair<size_t, size_t>> order;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) order.emplace_back(i, j);
    std::sort(order.begin(), order.end(), [&](auto& l, auto& r) {
        const size_t lmin = std::min(cands[l.first].members.size(), cands[l.second].members.size());
        const size_t rmin = std::min(cands[r.first].members.size(), cands[r.second].members.size());
        if (lmin != rmin) return lmin > rmin;
        return cands[l.first].members.size() + cands[l.second].members.size() >
               cands[r.first].members.size() + cands[r.second].members.size();
    });
    for (auto [i, j] : order) {
        const double dx = cands[i].cx - cands[j].cx;
        const double dy = cands[i].cy - cands[j].cy;
        const double dr = cands[i].cr - cands[j].cr;
        const double sep = std::sqrt(dx * dx + dy * dy + dr * dr);
        if (sep < t || sep > 99.0 * t) continue;
        BipartitePair pair = build(cands[i], cands[j]);
        if (validate_bipartite(pair)) return pair;
    }
    throw NoValidSplit("bipartite_split: no ball pair satisfies the t-bipartite invariant");
}

CircleFamily bernoulli_thin(const CircleFamily& family, double p, uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli_thin: p must be in [0,1]");
    CircleFamily out;
    out.delta = family.delta;
    out.kind = FamilyKind::Thinned;
    out.box = family.box;
    out.seed = seed;
    for (size_t i = 0; i < family.circles.size(); ++i)
        if (keyed_unit(seed, 11, static_cast<uint64_t>(i)) < p) out.circles.push_back(family.circles[i]);
    return out;
}

double min_pairwise_d(const CircleFamily& family) {
    const auto& cs = family.circles;
    if (cs.size() < 2) return std::numeric_limits<double>::infinity();
    double probe = family.delta > 0.0 ? family.delta : 1e-3;
    for (;;) {
        CellHash hash;
        hash.cell = probe;
        double best = std::numeric_limits<double>::infinity();
        for (uint32_t i = 0; i < cs.size(); ++i) {
            hash.for_neighbors(cs[i], [&](uint32_t j) {
                best = std::min(best, circle_space_dist(cs[i], cs[j]));
            });
            hash.insert(cs[i], i);
        }
        // Every pair with d <= probe lives in adjacent cells, so a minimum
        // no larger than the probe scale is exact.
        if (best <= probe) return best;
        if (probe > 64.0) return best; // families here live in O(1) boxes
        probe *= 2.0;
    }
}

bool validate_separation(const CircleFamily& family, double threshold) {
    return min_pairwise_d(family) > threshold;
}

bool validate_separation(const CircleFamily& family) {
    if (family.circles.size() < 2) return true;
    const double min_d = min_pairwise_d(family);
    switch (family.kind) {
        case FamilyKind::DeltaNet:
            return min_d > family.delta;
        case FamilyKind::Lattice:
            return min_d >= family.delta - geom::kUnitTol;
        case FamilyKind::Knapp:
            return min_d > family.delta / 2.0;
        case FamilyKind::RadiiSeparatedNet: {
            std::vector<double> radii;
            radii.reserve(family.circles.size());
            for (const auto& c : family.circles) radii.push_back(c.radius);
            std::sort(radii.begin(), radii.end());
            for (size_t i = 1; i < radii.size(); ++i)
                if (radii[i] - radii[i - 1] < family.delta - geom::kUnitTol) return false;
            return min_d > 0.0;
        }
        case FamilyKind::Thinned:
        case FamilyKind::Custom:
            return min_d > 0.0;
    }
    return false;
}

} // namespace incidence::families
