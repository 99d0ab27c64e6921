#include "incidence/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "incidence/counting.hpp"
#include "incidence/estimates.hpp"
#include "incidence/families.hpp"
#include "incidence/fit.hpp"
#include "incidence/probab.hpp"
#include "incidence/pyth.hpp"
#include "incidence/serialize.hpp"

namespace incidence::experiments {

using nlohmann::json;
using serialize::csv_double;

namespace {

void parallel_for(int64_t n, int workers, const std::function<void(int64_t)>& fn) {
    workers = std::max(1, workers);
    if (workers == 1 || n <= 1) {
        for (int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int64_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int64_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    for (auto& t : pool) t.join();
}

struct Csv {
    std::ostringstream out;
    explicit Csv(const std::string& header) { out << header << "\n"; }
    template <typename... Ts>
    void row(Ts&&... vals) {
        bool first = true;
        ((out << (first ? "" : ","), first = false, out << vals), ...);
        out << "\n";
    }
    std::string str() const { return out.str(); }
};

double get_num(const json& params, const std::string& key) {
    if (!params.contains(key)) throw ConfigError("missing param: " + key);
    if (!params[key].is_number()) throw ConfigError("param not numeric: " + key);
    return params[key].get<double>();
}

std::vector<int64_t> get_int_list(const json& params, const std::string& key) {
    if (!params.contains(key) || !params[key].is_array() || params[key].empty())
        throw ConfigError("missing or empty list param: " + key);
    std::vector<int64_t> out;
    for (const auto& v : params[key]) {
        if (!v.is_number_integer()) throw ConfigError("non-integer entry in " + key);
        out.push_back(v.get<int64_t>());
    }
    return out;
}

std::vector<double> get_num_list(const json& params, const std::string& key) {
    if (!params.contains(key) || !params[key].is_array() || params[key].empty())
        throw ConfigError("missing or empty list param: " + key);
    std::vector<double> out;
    for (const auto& v : params[key]) {
        if (!v.is_number()) throw ConfigError("non-numeric entry in " + key);
        out.push_back(v.get<double>());
    }
    return out;
}

// ---- TripleCount ----------------------------------------------------------

ExperimentOutput run_triple_count(const json& params, int workers) {
    const auto n_list = get_int_list(params, "n_list");
    const auto oracle_ns = get_int_list(params, "oracle_ns");
    ExperimentOutput out;
    Csv csv("N,count,ratio");

    std::vector<int64_t> counts(n_list.size());
    parallel_for(static_cast<int64_t>(n_list.size()), workers,
                 [&](int64_t i) { counts[i] = pyth::count_tangency_vectors(n_list[i], 0); });

    double ratio_lo = 1e300, ratio_hi = 0.0;
    for (size_t i = 0; i < n_list.size(); ++i) {
        const double ratio =
            static_cast<double>(counts[i]) / (static_cast<double>(n_list[i]) * std::log(n_list[i]));
        ratio_lo = std::min(ratio_lo, ratio);
        ratio_hi = std::max(ratio_hi, ratio);
        csv.row(n_list[i], counts[i], csv_double(ratio));
    }

    std::vector<char> parity(oracle_ns.size(), 0);
    parallel_for(static_cast<int64_t>(oracle_ns.size()), workers, [&](int64_t i) {
        parity[i] = pyth::count_tangency_vectors(oracle_ns[i], 0) ==
                    pyth::count_tangency_vectors_brute(oracle_ns[i], 0);
    });
    const bool parity_ok = std::all_of(parity.begin(), parity.end(), [](char c) { return c != 0; });

    const bool window_ok = ratio_lo >= accept::kTripleRatioLo && ratio_hi <= accept::kTripleRatioHi;
    out.pass = parity_ok && window_ok;
    out.csv = csv.str();
    out.summary = {{"ratio_lo", ratio_lo},
                   {"ratio_hi", ratio_hi},
                   {"window", {accept::kTripleRatioLo, accept::kTripleRatioHi}},
                   {"oracle_parity", parity_ok},
                   {"pass", out.pass}};
    return out;
}

// ---- LatticeTangency ------------------------------------------------------

ExperimentOutput run_lattice_tangency(const json& params, int workers) {
    const auto n_list = get_int_list(params, "n_list");
    const int64_t brute_max = static_cast<int64_t>(get_num(params, "brute_max"));
    ExperimentOutput out;
    Csv csv("N,family_size,pairs");

    std::vector<int64_t> sizes(n_list.size()), counts(n_list.size());
    std::vector<char> parity(n_list.size(), 1);
    parallel_for(static_cast<int64_t>(n_list.size()), workers, [&](int64_t i) {
        const auto fam = families::lattice_family(n_list[i]);
        sizes[i] = static_cast<int64_t>(fam.size());
        counts[i] = counting::count_exact_tangent_pairs(fam);
        if (n_list[i] <= brute_max)
            parity[i] = counts[i] == counting::count_exact_tangent_pairs_brute(fam);
    });

    std::vector<std::pair<double, double>> pts;
    for (size_t i = 0; i < n_list.size(); ++i) {
        csv.row(n_list[i], sizes[i], counts[i]);
        pts.emplace_back(static_cast<double>(sizes[i]), static_cast<double>(counts[i]));
    }
    const auto f = fit::fit_exponent(pts);
    const bool parity_ok = std::all_of(parity.begin(), parity.end(), [](char c) { return c != 0; });
    out.pass = parity_ok && f.slope >= accept::kLatticeSlopeLo && f.slope <= accept::kLatticeSlopeHi;
    out.csv = csv.str();
    out.summary = {{"slope", f.slope},
                   {"r_squared", f.r_squared},
                   {"window", {accept::kLatticeSlopeLo, accept::kLatticeSlopeHi}},
                   {"brute_parity", parity_ok},
                   {"pass", out.pass}};
    return out;
}

// ---- DeltaPairs -----------------------------------------------------------

ExperimentOutput run_delta_pairs(const json& params, int workers) {
    const auto n_list = get_int_list(params, "n_list");
    const double frac = get_num(params, "delta_frac");
    const double d_lo = get_num(params, "d_lo");
    const double d_hi = get_num(params, "d_hi");
    const int64_t brute_max = static_cast<int64_t>(get_num(params, "brute_max"));

    ExperimentOutput out;
    Csv csv("N,family_size,pairs,exact_pairs");
    std::vector<int64_t> sizes(n_list.size()), counts(n_list.size()), exacts(n_list.size());
    std::vector<char> parity(n_list.size(), 1);
    parallel_for(static_cast<int64_t>(n_list.size()), workers, [&](int64_t i) {
        const auto fam = families::lattice_family(n_list[i]);
        sizes[i] = static_cast<int64_t>(fam.size());
        counts[i] = counting::count_delta_tangent_pairs(fam, frac, d_lo, d_hi);
        // Diagnostic: the exactly-tangent portion of the window. On the
        // integer lattice the smallest nonzero defect is ~ delta/N, so for
        // N <= 100 the delta/100 count collapses onto this column.
        exacts[i] = counting::count_delta_tangent_pairs(fam, 1e-9, d_lo, d_hi);
        if (n_list[i] <= brute_max)
            parity[i] = counts[i] == counting::count_delta_tangent_pairs_brute(fam, frac, d_lo, d_hi);
    });

    std::vector<std::pair<double, double>> pts;
    for (size_t i = 0; i < n_list.size(); ++i) {
        csv.row(n_list[i], sizes[i], counts[i], exacts[i]);
        pts.emplace_back(static_cast<double>(sizes[i]), static_cast<double>(counts[i]));
    }
    const auto f = fit::fit_exponent(pts);
    const bool parity_ok = std::all_of(parity.begin(), parity.end(), [](char c) { return c != 0; });
    out.pass = parity_ok && f.slope >= accept::kDeltaPairSlopeLo;
    out.csv = csv.str();
    // Full (eps, t)-bucket census of a mid-size family for the record.
    const auto report = counting::incidence_report(families::lattice_family(16));
    out.summary = {{"slope", f.slope},
                   {"slope_floor", accept::kDeltaPairSlopeLo},
                   {"brute_parity", parity_ok},
                   {"incidence_report", json::parse(serialize::report_to_json(report))},
                   {"pass", out.pass}};
    return out;
}

// ---- KnappMultiplicity ----------------------------------------------------

ExperimentOutput run_knapp_multiplicity(const json& params, int workers) {
    const auto deltas = get_num_list(params, "delta_list");
    ExperimentOutput out;
    Csv csv("delta,family_size,threshold,lambda,fraction,lo,hi");

    struct Row {
        double delta, threshold, lam, fraction;
        int64_t size;
        bool ok;
    };
    std::vector<Row> rows(deltas.size());
    parallel_for(static_cast<int64_t>(deltas.size()), workers, [&](int64_t i) {
        const double delta = deltas[i];
        const auto fam = families::knapp_family(delta);
        const double lam = std::sqrt(delta);
        const double threshold = accept::kKnappThresholdMult / lam *
                                 std::pow(static_cast<double>(fam.size()), 2.0 / 3.0);
        // A member near the middle of the slab.
        const geom::Circle probe = fam.circles[fam.circles.size() / 2];
        const double fraction =
            counting::high_multiplicity_fraction(probe, fam, delta, threshold);
        rows[i] = {delta, threshold, lam, fraction, static_cast<int64_t>(fam.size()),
                   fraction >= lam / 8.0 && fraction <= 8.0 * lam};
    });

    out.pass = true;
    for (const auto& r : rows) {
        csv.row(csv_double(r.delta), r.size, csv_double(r.threshold), csv_double(r.lam),
                csv_double(r.fraction), csv_double(r.lam / 8.0), csv_double(8.0 * r.lam));
        out.pass = out.pass && r.ok;
    }
    out.csv = csv.str();
    out.summary = {{"pass", out.pass}};
    return out;
}

// ---- BernoulliTail --------------------------------------------------------

ExperimentOutput run_bernoulli_tail(const json& params, int workers) {
    const int64_t n_max = static_cast<int64_t>(get_num(params, "n_max"));
    const auto alphas = get_num_list(params, "alphas");
    const auto ps = get_num_list(params, "ps");

    std::atomic<int64_t> violations{0};
    std::vector<double> worst_margin(static_cast<size_t>(n_max), 1e300);
    parallel_for(n_max, workers, [&](int64_t i) {
        const int64_t N = i + 1;
        double margin = 1e300;
        for (double p : ps)
            for (double alpha : alphas) {
                const double tail = probab::binomial_tail(N, p, alpha).probability;
                const double bound = probab::binomial_tail_bound(N, p, alpha);
                if (tail > bound) ++violations;
                margin = std::min(margin, bound - tail);
            }
        worst_margin[static_cast<size_t>(i)] = margin;
    });

    ExperimentOutput out;
    Csv csv("N,min_margin");
    double global_margin = 1e300;
    for (int64_t i = 0; i < n_max; ++i) {
        csv.row(i + 1, csv_double(worst_margin[static_cast<size_t>(i)]));
        global_margin = std::min(global_margin, worst_margin[static_cast<size_t>(i)]);
    }
    out.pass = violations.load() == 0;
    out.csv = csv.str();
    out.summary = {{"violations", violations.load()}, {"min_margin", global_margin}, {"pass", out.pass}};
    return out;
}

// ---- SimplexProb ----------------------------------------------------------

ExperimentOutput run_simplex_prob(const json& params, int workers) {
    const auto eps_list = get_num_list(params, "eps_list");
    const int64_t trials = static_cast<int64_t>(get_num(params, "trials"));
    const uint64_t seed = static_cast<uint64_t>(get_num(params, "seed"));

    const auto disk = probab::RegionSpec::ball({0.0, 0.0}, 1.0);
    std::vector<probab::ProbEstimate> est(eps_list.size());
    parallel_for(static_cast<int64_t>(eps_list.size()), workers, [&](int64_t i) {
        est[i] = probab::simplex_probability(disk, 3, eps_list[i], trials, seed + static_cast<uint64_t>(i));
    });

    // Least squares through the origin: estimate ~ C * eps.
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < eps_list.size(); ++i) {
        num += est[i].estimate * eps_list[i];
        den += eps_list[i] * eps_list[i];
    }
    const double C = num / den;
    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t i = 0; i < eps_list.size(); ++i) {
        const double r = est[i].estimate - C * eps_list[i];
        ss_res += r * r;
        ss_tot += est[i].estimate * est[i].estimate;
    }
    const double residual = std::sqrt(ss_res / ss_tot);

    // Rearrangement direction: fragmented sets of equal volume compared to
    // the ball at a fixed eps.
    const double frag_eps = eps_list.size() > 1 ? eps_list[1] : eps_list[0];
    const auto ball_ref = probab::simplex_probability(disk, 3, frag_eps, trials, seed + 101);
    const double rho = 1.0 / std::sqrt(5.0);
    const std::vector<std::vector<std::vector<double>>> layouts = {
        {{0, 0}, {3, 0}, {6, 0}, {0, 3}, {3, 3}},
        {{0, 0}, {2, 0}, {4, 0}, {6, 0}, {8, 0}},
        {{0, 0}, {0, 2}, {2, 0}, {-2, 0}, {0, -2}},
        {{0, 0}, {5, 0}, {0, 5}, {5, 5}, {2.5, 2.5}},
        {{0, 0}, {1.5, 1.5}, {3, 0}, {4.5, 1.5}, {6, 0}},
    };
    std::vector<probab::ProbEstimate> frag(layouts.size());
    parallel_for(static_cast<int64_t>(layouts.size()), workers, [&](int64_t i) {
        const auto s = probab::RegionSpec::union_of_balls(layouts[static_cast<size_t>(i)], rho);
        frag[i] = probab::simplex_probability(s, 3, frag_eps, trials, seed + 200 + static_cast<uint64_t>(i));
    });
    bool rearrangement_ok = true;
    for (const auto& fe : frag)
        if (fe.estimate > ball_ref.estimate + 3.0 * std::max(fe.std_error, ball_ref.std_error))
            rearrangement_ok = false;

    ExperimentOutput out;
    Csv csv("eps,estimate,std_error");
    for (size_t i = 0; i < eps_list.size(); ++i)
        csv.row(csv_double(eps_list[i]), csv_double(est[i].estimate), csv_double(est[i].std_error));
    out.pass = C >= accept::kSimplexCLo && C <= accept::kSimplexCHi &&
               residual < accept::kSimplexMaxResidual && rearrangement_ok;
    out.csv = csv.str();
    out.summary = {{"C", C},
                   {"residual", residual},
                   {"rearrangement_ok", rearrangement_ok},
                   {"ball_reference", ball_ref.estimate},
                   {"pass", out.pass}};
    return out;
}

// ---- ThreeCircleVolume ----------------------------------------------------

ExperimentOutput run_three_circle(const json& params, int workers) {
    const int64_t triples = static_cast<int64_t>(get_num(params, "triples"));
    const int64_t trials = static_cast<int64_t>(get_num(params, "trials"));
    const double eps = get_num(params, "eps");
    const double t = get_num(params, "t");
    const double lam = get_num(params, "lam");
    const uint64_t seed = static_cast<uint64_t>(get_num(params, "seed"));

    struct Row {
        double estimate, bound;
        int64_t hits;
    };
    std::vector<Row> rows(static_cast<size_t>(triples));
    parallel_for(triples, workers, [&](int64_t i) {
        CounterRng rng(seed, 300 + static_cast<uint64_t>(i));
        auto rand_circle = [&] {
            return geom::Circle({rng.next_unit(), rng.next_unit()}, rng.next_range(0.5, 1.0));
        };
        const auto v = counting::three_circle_set_volume(rand_circle(), rand_circle(), rand_circle(),
                                                         eps, t, lam, trials,
                                                         seed ^ (0x51ULL + static_cast<uint64_t>(i)));
        rows[static_cast<size_t>(i)] = {v.estimate, v.bound, v.hits};
    });

    ExperimentOutput out;
    Csv csv("triple,estimate,hits,bound,cap");
    out.pass = true;
    for (int64_t i = 0; i < triples; ++i) {
        const auto& r = rows[static_cast<size_t>(i)];
        const double cap = accept::kThreeCircleFactor * r.bound;
        csv.row(i, csv_double(r.estimate), r.hits, csv_double(r.bound), csv_double(cap));
        out.pass = out.pass && r.estimate <= cap;
    }
    out.csv = csv.str();
    out.summary = {{"pass", out.pass}};
    return out;
}

// ---- TwoCircleCount -------------------------------------------------------

ExperimentOutput run_two_circle(const json& params, int workers) {
    const double delta = get_num(params, "delta");
    const int64_t draws = static_cast<int64_t>(get_num(params, "draws"));
    const double tau = get_num(params, "tau");
    const uint64_t seed = static_cast<uint64_t>(get_num(params, "seed"));
    const double factor = get_num(params, "factor");

    const auto fam = families::cell_net_family(delta, families::unit_box(), seed);
    struct Row {
        int64_t count;
        double bound;
    };
    std::vector<Row> rows(static_cast<size_t>(draws));
    parallel_for(draws, workers, [&](int64_t i) {
        CounterRng rng(seed, 500 + static_cast<uint64_t>(i));
        // Internally tangent pair with d = tau: radii r and r + tau/2,
        // centers tau/2 apart.
        const double r1 = rng.next_range(0.55, 0.7);
        const double angle = rng.next_range(0.0, 2.0 * M_PI);
        const geom::Vec2 c1{rng.next_range(0.3, 0.7), rng.next_range(0.3, 0.7)};
        const geom::Vec2 c2 = c1 + (tau / 2.0) * geom::unit_at(angle);
        const geom::Circle a(c1, r1);
        const geom::Circle b(c2, r1 + tau / 2.0);
        const auto nc = counting::neighborhood_intersection_count(fam, a, b, delta, tau);
        rows[static_cast<size_t>(i)] = {nc.count, nc.bound};
    });

    ExperimentOutput out;
    Csv csv("draw,count,bound,cap");
    out.pass = true;
    for (int64_t i = 0; i < draws; ++i) {
        const auto& r = rows[static_cast<size_t>(i)];
        csv.row(i, r.count, csv_double(r.bound), csv_double(factor * r.bound));
        out.pass = out.pass && static_cast<double>(r.count) <= factor * r.bound;
    }
    out.csv = csv.str();
    out.summary = {{"family_size", fam.size()}, {"pass", out.pass}};
    return out;
}

// ---- GoodRectangles -------------------------------------------------------

ExperimentOutput run_good_rectangles(const json& params, int workers) {
    const double delta = get_num(params, "delta");
    const double A = get_num(params, "A");
    const auto seeds = get_int_list(params, "seeds");
    const uint64_t net_seed = static_cast<uint64_t>(get_num(params, "net_seed"));

    const double p = A * std::pow(delta, 1.5);
    struct Row {
        int64_t w, b, incidences, good;
        bool ok;
    };
    std::vector<Row> rows(seeds.size());
    families::CircleFamily first_union;
    std::vector<counting::RectangleTypeRecord> first_rects;
    parallel_for(static_cast<int64_t>(seeds.size()), workers, [&](int64_t i) {
        const auto thinned = families::thinned_cell_net(delta, families::unit_box(), p, net_seed,
                                                        static_cast<uint64_t>(seeds[i]));
        // The two pieces at a fixed separation: x-slabs with a 0.2 gap.
        families::CircleFamily W, B;
        W.delta = B.delta = delta;
        W.kind = B.kind = families::FamilyKind::Custom;
        W.box = B.box = thinned.box;
        for (const auto& c : thinned.circles) {
            if (c.center.x <= 0.4)
                W.circles.push_back(c);
            else if (c.center.x >= 0.6)
                B.circles.push_back(c);
        }
        int64_t incid = 0;
        for (const auto& w : W.circles)
            for (const auto& b : B.circles)
                if (geom::is_delta_tangent(w, b, delta)) ++incid;
        counting::TypeRectangleMode mode;
        mode.good_only = true;
        mode.A = A;
        const auto rects = counting::type_rectangles(W, B, 1.0, delta, mode);
        const double good_floor = accept::kGoodRectangleCoeff / (delta * delta);
        const double incid_cap = std::pow(delta, -accept::kIncidenceExponent);
        rows[i] = {static_cast<int64_t>(W.size()), static_cast<int64_t>(B.size()), incid,
                   static_cast<int64_t>(rects.size()),
                   static_cast<double>(rects.size()) >= good_floor &&
                       static_cast<double>(incid) <= incid_cap};
        if (i == 0) {
            first_union = W;
            first_union.circles.insert(first_union.circles.end(), B.circles.begin(),
                                       B.circles.end());
            first_rects = rects;
        }
    });
    const auto report = counting::incidence_report(first_union, first_rects);

    ExperimentOutput out;
    Csv csv("seed,W,B,incidences,good");
    int ok_count = 0;
    for (size_t i = 0; i < seeds.size(); ++i) {
        csv.row(seeds[i], rows[i].w, rows[i].b, rows[i].incidences, rows[i].good);
        ok_count += rows[i].ok ? 1 : 0;
    }
    out.pass = ok_count * 10 >= static_cast<int>(seeds.size()) * 9; // >= 90% of seeds
    out.csv = csv.str();
    out.summary = {{"seed_pass_count", ok_count},
                   {"seeds", seeds.size()},
                   {"good_floor", accept::kGoodRectangleCoeff / (delta * delta)},
                   {"incidence_cap", std::pow(delta, -accept::kIncidenceExponent)},
                   {"first_seed_report", json::parse(serialize::report_to_json(report))},
                   {"pass", out.pass}};
    return out;
}

// ---- WolffRectangles ------------------------------------------------------

ExperimentOutput run_wolff_rectangles(const json& params, int workers) {
    (void)workers;
    const double delta = get_num(params, "delta");
    // Two sub-slabs of the Knapp configuration through a common point,
    // separated in radius: every cross pair is tangent near the origin.
    const auto full = families::knapp_family(delta);
    families::CircleFamily W, B;
    W.delta = B.delta = delta;
    W.kind = B.kind = families::FamilyKind::Custom;
    for (const auto& c : full.circles) {
        if (c.radius < 1.3)
            W.circles.push_back(c);
        else if (c.radius > 1.7)
            B.circles.push_back(c);
    }
    const auto recs = counting::type_rectangles(W, B, 1.0, delta);
    uint32_t best_mu = 0, best_nu = 0;
    for (const auto& r : recs) {
        if (static_cast<uint64_t>(r.mu) * r.nu >
            static_cast<uint64_t>(best_mu) * best_nu) {
            best_mu = r.mu;
            best_nu = r.nu;
        }
    }
    const double bound =
        counting::wolff_bound(static_cast<int64_t>(W.size()), static_cast<int64_t>(B.size()),
                              std::max<int64_t>(1, best_mu), std::max<int64_t>(1, best_nu), 0.0, 1.0);

    ExperimentOutput out;
    Csv csv("rectangles,W,B,best_mu,best_nu,wolff_bound");
    csv.row(recs.size(), W.size(), B.size(), best_mu, best_nu, csv_double(bound));
    // The common tangency point forces one dominant rectangle seen by most
    // of both families, and the bound at that type is O((mn)^eps).
    out.pass = !recs.empty() && best_mu >= W.size() / 2 && best_nu >= B.size() / 2 &&
               static_cast<double>(recs.size()) <= bound * 64.0;
    out.csv = csv.str();
    out.summary = {{"rectangles", recs.size()},
                   {"best_mu", best_mu},
                   {"best_nu", best_nu},
                   {"bound", bound},
                   {"pass", out.pass}};
    return out;
}

// ---- CircularLevelSet -----------------------------------------------------

ExperimentOutput run_circular_levelset(const json& params, int workers) {
    const auto deltas = get_num_list(params, "delta_list");
    const int lam_min_pow = static_cast<int>(get_num(params, "lambda_min_pow"));

    struct Task {
        std::string name;
        double delta;
    };
    std::vector<Task> tasks;
    for (double d : deltas)
        for (const char* name : {"focusing", "knapp", "scaling"}) tasks.push_back({name, d});

    std::vector<double> max_ratio(tasks.size(), 0.0);
    std::vector<std::string> rows(tasks.size());
    parallel_for(static_cast<int64_t>(tasks.size()), workers, [&](int64_t i) {
        const auto& task = tasks[static_cast<size_t>(i)];
        probab::RegionSpec E = task.name == "focusing" ? estimates::focusing_example(task.delta)
                               : task.name == "knapp"  ? estimates::knapp_example(task.delta)
                                                       : estimates::scaling_example(task.delta);
        std::vector<double> lambdas;
        for (int k = 1; k <= lam_min_pow; ++k) lambdas.push_back(std::exp2(-k));
        const auto sweep = estimates::circular_levelset_sweep(E, task.delta, task.delta / 2.0, 2, lambdas);
        std::ostringstream os;
        for (const auto& r : sweep) {
            max_ratio[static_cast<size_t>(i)] = std::max(max_ratio[static_cast<size_t>(i)], r.ratio);
            os << csv_double(task.delta) << "," << task.name << "," << csv_double(r.lambda) << ","
               << csv_double(r.measure_E) << "," << csv_double(r.measure_F) << ","
               << csv_double(r.ratio) << "\n";
        }
        rows[static_cast<size_t>(i)] = os.str();
    });

    double overall = 0.0, focusing_max = 0.0;
    std::ostringstream body;
    for (size_t i = 0; i < tasks.size(); ++i) {
        body << rows[i];
        overall = std::max(overall, max_ratio[i]);
        if (tasks[i].name == "focusing") focusing_max = std::max(focusing_max, max_ratio[i]);
    }

    ExperimentOutput out;
    out.csv = "delta,example,lambda,measure_E,measure_F,ratio\n" + body.str();
    out.pass = overall <= accept::kCircularRatioCap &&
               focusing_max >= 0.01 * accept::kCircularRatioCap;
    out.summary = {{"max_ratio", overall},
                   {"focusing_max", focusing_max},
                   {"cap", accept::kCircularRatioCap},
                   {"pass", out.pass}};
    return out;
}

// ---- ConeLevelSet ---------------------------------------------------------

ExperimentOutput run_cone_levelset(const json& params, int workers) {
    (void)workers;
    const double delta = get_num(params, "delta");
    std::vector<double> lambdas;
    for (int k = 1; k <= 12; ++k) lambdas.push_back(std::exp2(-k));

    const auto knapp = estimates::cone_levelset_sweep(estimates::knapp_example(delta), delta,
                                                      delta / 2.0, lambdas);
    ExperimentOutput out;
    Csv csv("example,delta,lambda,measure_E,measure_F,ratio");
    double knapp_best = 0.0;
    for (const auto& r : knapp) {
        csv.row("knapp", csv_double(r.delta), csv_double(r.lambda), csv_double(r.measure_E),
                csv_double(r.measure_F), csv_double(r.ratio));
        knapp_best = std::max(knapp_best, r.ratio);
    }
    double knapp_best_lambda = 0.0;
    for (const auto& r : knapp)
        if (r.ratio == knapp_best) knapp_best_lambda = r.lambda;

    const auto box = estimates::cone_levelset_sweep(probab::RegionSpec::box({0.0, 0.0}, {1.0, 1.0}),
                                                    delta, delta / 2.0, lambdas);
    double box_best = 0.0;
    for (const auto& r : box) {
        csv.row("box", csv_double(r.delta), csv_double(r.lambda), csv_double(r.measure_E),
                csv_double(r.measure_F), csv_double(r.ratio));
        box_best = std::max(box_best, r.ratio);
    }

    out.csv = csv.str();
    // The hugging circles average sqrt(delta)/(2 pi t) of their mass, which
    // places the extremal level a fixed constant below sqrt(delta).
    const double root = std::sqrt(delta);
    out.pass = knapp_best >= 0.04 && knapp_best <= 0.4 && knapp_best_lambda >= root / 16.0 &&
               knapp_best_lambda <= root && box_best <= 0.5;
    out.summary = {{"knapp_max_ratio", knapp_best},
                   {"knapp_best_lambda", knapp_best_lambda},
                   {"box_max_ratio", box_best},
                   {"pass", out.pass}};
    return out;
}

// ---- RotCurvDet -----------------------------------------------------------

std::vector<double> random_unit(CounterRng& rng, int d) {
    std::vector<double> v(d);
    for (;;) {
        double n2 = 0.0;
        for (int i = 0; i < d; ++i) {
            v[i] = rng.next_range(-1.0, 1.0);
            n2 += v[i] * v[i];
        }
        if (n2 > 1e-4 && n2 <= 1.0) {
            const double n = std::sqrt(n2);
            for (auto& c : v) c /= n;
            return v;
        }
    }
}

ExperimentOutput run_rot_curv(const json& params, int workers) {
    const int64_t points = static_cast<int64_t>(get_num(params, "points"));
    const uint64_t seed = static_cast<uint64_t>(get_num(params, "seed"));

    struct Case {
        geom::DefiningFunction::Kind kind;
        int dim;
    };
    const std::vector<Case> cases = {{geom::DefiningFunction::Kind::Sphere, 2},
                                     {geom::DefiningFunction::Kind::Sphere, 3},
                                     {geom::DefiningFunction::Kind::Plane, 2},
                                     {geom::DefiningFunction::Kind::Plane, 3}};
    std::vector<double> min_abs(cases.size(), 1e300), max_rel(cases.size(), 0.0);
    parallel_for(static_cast<int64_t>(cases.size()), workers, [&](int64_t ci) {
        const auto& c = cases[static_cast<size_t>(ci)];
        const geom::DefiningFunction phi(c.kind, c.dim);
        CounterRng rng(seed, 700 + static_cast<uint64_t>(ci));
        for (int64_t i = 0; i < points; ++i) {
            std::vector<double> x(c.dim), y(c.dim);
            if (c.kind == geom::DefiningFunction::Kind::Sphere) {
                for (int k = 0; k < c.dim; ++k) x[k] = rng.next_range(-1.0, 1.0);
                const auto u = random_unit(rng, c.dim);
                for (int k = 0; k < c.dim; ++k) y[k] = x[k] + u[k];
            } else {
                // x . y = 1 with y bounded away from 0.
                double n2 = 0.0;
                for (int k = 0; k < c.dim; ++k) {
                    y[k] = rng.next_range(0.5, 1.5);
                    n2 += y[k] * y[k];
                }
                for (int k = 0; k < c.dim; ++k) x[k] = y[k] / n2;
                // add a tangential component to x
                const auto u = random_unit(rng, c.dim);
                double uy = 0.0;
                for (int k = 0; k < c.dim; ++k) uy += u[k] * y[k];
                for (int k = 0; k < c.dim; ++k) x[k] += 0.3 * (u[k] - uy * y[k] / n2);
            }
            const double det = geom::rotational_curvature_det(phi, x, y);
            const double fd = fd_rotational_curvature_det(phi, x, y);
            min_abs[static_cast<size_t>(ci)] =
                std::min(min_abs[static_cast<size_t>(ci)], std::abs(det));
            max_rel[static_cast<size_t>(ci)] = std::max(
                max_rel[static_cast<size_t>(ci)], std::abs(det - fd) / std::max(1e-12, std::abs(det)));
        }
    });

    ExperimentOutput out;
    Csv csv("kind,dimension,min_abs_det,max_fd_rel_err");
    out.pass = true;
    for (size_t i = 0; i < cases.size(); ++i) {
        csv.row(cases[i].kind == geom::DefiningFunction::Kind::Sphere ? "sphere" : "plane",
                cases[i].dim, csv_double(min_abs[i]), csv_double(max_rel[i]));
        out.pass = out.pass && min_abs[i] >= accept::kDetFloor && max_rel[i] <= accept::kDetFdRelTol;
    }
    out.csv = csv.str();
    out.summary = {{"pass", out.pass}};
    return out;
}

} // namespace

double fd_rotational_curvature_det(const geom::DefiningFunction& phi, const std::vector<double>& x,
                                   const std::vector<double>& y, double step) {
    const int d = phi.dimension;
    const int n = d + 1;
    std::vector<double> m(static_cast<size_t>(n) * n);
    m[0] = phi.phi(x, y);
    auto shifted = [&](const std::vector<double>& v, int k, double h) {
        auto w = v;
        w[static_cast<size_t>(k)] += h;
        return w;
    };
    for (int j = 0; j < d; ++j)
        m[static_cast<size_t>(j) + 1] =
            (phi.phi(x, shifted(y, j, step)) - phi.phi(x, shifted(y, j, -step))) / (2.0 * step);
    for (int i = 0; i < d; ++i) {
        m[static_cast<size_t>(i + 1) * n] =
            (phi.phi(shifted(x, i, step), y) - phi.phi(shifted(x, i, -step), y)) / (2.0 * step);
        for (int j = 0; j < d; ++j) {
            const double pp = phi.phi(shifted(x, i, step), shifted(y, j, step));
            const double pm = phi.phi(shifted(x, i, step), shifted(y, j, -step));
            const double mp = phi.phi(shifted(x, i, -step), shifted(y, j, step));
            const double mm = phi.phi(shifted(x, i, -step), shifted(y, j, -step));
            m[static_cast<size_t>(i + 1) * n + j + 1] = (pp - pm - mp + mm) / (4.0 * step * step);
        }
    }
    return geom::dense_det(std::move(m), n);
}

uint64_t fnv1a(const std::string& bytes) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<std::string> experiment_names() {
    return {"TripleCount",   "LatticeTangency", "DeltaPairs",     "KnappMultiplicity",
            "WolffRectangles", "GoodRectangles", "BernoulliTail",  "SimplexProb",
            "ThreeCircleVolume", "TwoCircleCount", "CircularLevelSet", "ConeLevelSet",
            "RotCurvDet"};
}

json default_params(const std::string& experiment) {
    if (experiment == "TripleCount")
        return {{"n_list", {256, 512, 1024, 2048, 4096, 8192, 16384}},
                {"oracle_ns", {1, 2, 3, 4, 5, 6, 7, 8, 12, 16, 25, 64, 100, 300, 1000, 2000}}};
    if (experiment == "LatticeTangency")
        return {{"n_list", {8, 16, 32, 64}}, {"brute_max", 16}};
    if (experiment == "DeltaPairs")
        return {{"n_list", {8, 16, 32}},
                {"delta_frac", 0.01},
                {"d_lo", 0.5},
                {"d_hi", 2.0},
                {"brute_max", 16}};
    if (experiment == "KnappMultiplicity")
        return {{"delta_list", {0.015625, 0.00390625, 0.0009765625}}};
    if (experiment == "WolffRectangles") return {{"delta", 0.015625}};
    if (experiment == "GoodRectangles")
        return {{"delta", 0.00390625},
                {"A", 8.0},
                {"net_seed", 777},
                {"seeds", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20}}};
    if (experiment == "BernoulliTail")
        return {{"n_max", 200},
                {"ps", {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5}},
                {"alphas", {0.1, 0.25, 0.5}}};
    if (experiment == "SimplexProb")
        return {{"eps_list", {0.01, 0.02, 0.05, 0.1}}, {"trials", 1000000}, {"seed", 4242}};
    if (experiment == "ThreeCircleVolume")
        return {{"triples", 20},
                {"trials", 1000000},
                {"eps", 0.0009765625},
                {"t", 0.5},
                {"lam", 0.25},
                {"seed", 99}};
    if (experiment == "TwoCircleCount")
        return {{"delta", 0.0078125}, {"draws", 50}, {"tau", 0.5}, {"seed", 31}, {"factor", 20.0}};
    if (experiment == "CircularLevelSet")
        return {{"delta_list", {0.03125, 0.015625, 0.0078125, 0.00390625}}, {"lambda_min_pow", 12}};
    if (experiment == "ConeLevelSet") return {{"delta", 0.015625}};
    if (experiment == "RotCurvDet") return {{"points", 1000}, {"seed", 7}};
    throw ConfigError("unknown experiment: " + experiment);
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");
    if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != 1)
        throw ConfigError("config field 'version' must be the integer 1");
    if (!j.contains("experiment") || !j["experiment"].is_string())
        throw ConfigError("config field 'experiment' must be a string");
    ExperimentConfig cfg;
    cfg.experiment = j["experiment"].get<std::string>();
    const auto names = experiment_names();
    if (std::find(names.begin(), names.end(), cfg.experiment) == names.end())
        throw ConfigError("unknown experiment: " + cfg.experiment);
    cfg.params = default_params(cfg.experiment);
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw ConfigError("config field 'params' must be an object");
        for (auto& [k, v] : j["params"].items()) cfg.params[k] = v;
    }
    return cfg;
}

ExperimentOutput run(const ExperimentConfig& cfg, int workers) {
    if (cfg.experiment == "TripleCount") return run_triple_count(cfg.params, workers);
    if (cfg.experiment == "LatticeTangency") return run_lattice_tangency(cfg.params, workers);
    if (cfg.experiment == "DeltaPairs") return run_delta_pairs(cfg.params, workers);
    if (cfg.experiment == "KnappMultiplicity") return run_knapp_multiplicity(cfg.params, workers);
    if (cfg.experiment == "WolffRectangles") return run_wolff_rectangles(cfg.params, workers);
    if (cfg.experiment == "GoodRectangles") return run_good_rectangles(cfg.params, workers);
    if (cfg.experiment == "BernoulliTail") return run_bernoulli_tail(cfg.params, workers);
    if (cfg.experiment == "SimplexProb") return run_simplex_prob(cfg.params, workers);
    if (cfg.experiment == "ThreeCircleVolume") return run_three_circle(cfg.params, workers);
    if (cfg.experiment == "TwoCircleCount") return run_two_circle(cfg.params, workers);
    if (cfg.experiment == "CircularLevelSet") return run_circular_levelset(cfg.params, workers);
    if (cfg.experiment == "ConeLevelSet") return run_cone_levelset(cfg.params, workers);
    if (cfg.experiment == "RotCurvDet") return run_rot_curv(cfg.params, workers);
    throw ConfigError("unknown experiment: " + cfg.experiment);
}

int run_to_dir(const ExperimentConfig& cfg, const std::string& out_dir, int workers) {
    ExperimentOutput output;
    try {
        output = run(cfg, workers);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        // Degenerate grids count as assertion failures; flush what we have.
        output.pass = false;
        output.csv = "";
        output.summary = {{"pass", false}, {"error", e.what()}};
    }
    std::filesystem::create_directories(out_dir);
    const std::string summary = output.summary.dump(2) + "\n";
    {
        std::ofstream f(out_dir + "/data.csv", std::ios::binary);
        f << output.csv;
    }
    {
        std::ofstream f(out_dir + "/summary.json", std::ios::binary);
        f << summary;
    }
    {
        json cfg_json = {{"version", 1}, {"experiment", cfg.experiment}, {"params", cfg.params}};
        std::ofstream f(out_dir + "/MANIFEST");
        f << "config " << fnv1a(cfg_json.dump()) << "\n";
        f << "data.csv " << fnv1a(output.csv) << "\n";
        f << "summary.json " << fnv1a(summary) << "\n";
    }
    return output.pass ? 0 : 2;
}

} // namespace incidence::experiments
