#include "incidence/estimates.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace incidence::estimates {

namespace {

struct Field2 {
    double lo_x = 0.0, lo_y = 0.0;
    double h = 0.0;
    int64_t nx = 0, ny = 0;
    std::vector<double> value;
    int64_t e_cells = 0;

    int64_t idx(int64_t ix, int64_t iy) const { return iy * nx + ix; }
};

// Integer offsets of grid cells meeting the delta-shell of radius R.
std::vector<std::pair<int32_t, int32_t>> ring_offsets(double R, double delta, double h) {
    std::vector<std::pair<int32_t, int32_t>> offs;
    const int64_t reach = static_cast<int64_t>(std::ceil((R + delta) / h)) + 1;
    for (int64_t iy = -reach; iy <= reach; ++iy)
        for (int64_t ix = -reach; ix <= reach; ++ix) {
            const double rho = std::hypot(static_cast<double>(ix) * h, static_cast<double>(iy) * h);
            if (std::abs(rho - R) <= delta)
                offs.emplace_back(static_cast<int32_t>(ix), static_cast<int32_t>(iy));
        }
    return offs;
}

// Accumulates (chi_E * sigma)(x) over the grid, sigma the unit-mass uniform
// measure on the delta-shell of radius R.
Field2 convolve2(const RegionSpec& E, double R, double delta, double h) {
    const auto eb = E.bounds();
    const double margin = R + delta + 2.0 * h;
    Field2 f;
    f.h = h;
    f.lo_x = eb[0].first - margin;
    f.lo_y = eb[1].first - margin;
    f.nx = static_cast<int64_t>(std::ceil((eb[0].second + margin - f.lo_x) / h)) + 1;
    f.ny = static_cast<int64_t>(std::ceil((eb[1].second + margin - f.lo_y) / h)) + 1;
    f.value.assign(static_cast<size_t>(f.nx * f.ny), 0.0);

    const auto offs = ring_offsets(R, delta, h);
    if (offs.empty()) throw std::invalid_argument("convolve2: shell resolves to no cells");
    const double w = 1.0 / static_cast<double>(offs.size());

    // E sampled at grid points inside its own bounding box.
    const int64_t ex0 = static_cast<int64_t>(std::floor((eb[0].first - f.lo_x) / h)) - 1;
    const int64_t ex1 = static_cast<int64_t>(std::ceil((eb[0].second - f.lo_x) / h)) + 1;
    const int64_t ey0 = static_cast<int64_t>(std::floor((eb[1].first - f.lo_y) / h)) - 1;
    const int64_t ey1 = static_cast<int64_t>(std::ceil((eb[1].second - f.lo_y) / h)) + 1;
    std::vector<double> p(2);
    for (int64_t iy = ey0; iy <= ey1; ++iy)
        for (int64_t ix = ex0; ix <= ex1; ++ix) {
            p[0] = f.lo_x + static_cast<double>(ix) * h;
            p[1] = f.lo_y + static_cast<double>(iy) * h;
            if (!E.contains(p)) continue;
            ++f.e_cells;
            for (const auto& [ox, oy] : offs) {
                const int64_t jx = ix + ox, jy = iy + oy;
                if (jx < 0 || jx >= f.nx || jy < 0 || jy >= f.ny) continue;
                f.value[static_cast<size_t>(f.idx(jx, jy))] += w;
            }
        }
    if (f.e_cells == 0) throw EmptyE("level set: |E| = 0 on this grid");
    return f;
}

std::vector<std::array<int32_t, 3>> shell_offsets3(double R, double delta, double h) {
    std::vector<std::array<int32_t, 3>> offs;
    const int64_t reach = static_cast<int64_t>(std::ceil((R + delta) / h)) + 1;
    for (int64_t iz = -reach; iz <= reach; ++iz)
        for (int64_t iy = -reach; iy <= reach; ++iy)
            for (int64_t ix = -reach; ix <= reach; ++ix) {
                const double rho = std::sqrt(static_cast<double>(ix * ix + iy * iy + iz * iz)) * h;
                if (std::abs(rho - R) <= delta)
                    offs.push_back({static_cast<int32_t>(ix), static_cast<int32_t>(iy),
                                    static_cast<int32_t>(iz)});
            }
    return offs;
}

} // namespace

std::vector<LevelSetResult> circular_levelset_sweep(const RegionSpec& E, double delta,
                                                    double spacing, int dimension,
                                                    const std::vector<double>& lambdas) {
    if (!(spacing > 0.0 && spacing <= delta / 2.0))
        throw std::invalid_argument("circular_average_levelset: need spacing <= delta/2");
    if (dimension != 2 && dimension != 3)
        throw std::invalid_argument("circular_average_levelset: dimension 2 or 3");

    std::vector<LevelSetResult> out;
    const double h = spacing;

    if (dimension == 2) {
        const Field2 f = convolve2(E, 1.0, delta, h);
        const double mE = static_cast<double>(f.e_cells) * h * h;
        for (double lam : lambdas) {
            int64_t above = 0;
            for (double v : f.value)
                if (v > lam) ++above;
            LevelSetResult r;
            r.delta = delta;
            r.lambda = lam;
            r.grid_spacing = h;
            r.measure_E = mE;
            r.measure_F = static_cast<double>(above) * h * h;
            r.ratio = lam * lam * lam * r.measure_F / (mE * mE);
            out.push_back(r);
        }
        return out;
    }

    // dimension == 3
    const auto eb = E.bounds();
    const double margin = 1.0 + delta + 2.0 * h;
    const double lo[3] = {eb[0].first - margin, eb[1].first - margin, eb[2].first - margin};
    int64_t n[3];
    for (int k = 0; k < 3; ++k)
        n[k] = static_cast<int64_t>(std::ceil((eb[k].second + margin - lo[k]) / h)) + 1;
    std::vector<double> value(static_cast<size_t>(n[0] * n[1] * n[2]), 0.0);
    const auto offs = shell_offsets3(1.0, delta, h);
    const double w = 1.0 / static_cast<double>(offs.size());

    int64_t e_cells = 0;
    std::vector<double> p(3);
    for (int64_t iz = 0; iz < n[2]; ++iz)
        for (int64_t iy = 0; iy < n[1]; ++iy)
            for (int64_t ix = 0; ix < n[0]; ++ix) {
                p[0] = lo[0] + static_cast<double>(ix) * h;
                p[1] = lo[1] + static_cast<double>(iy) * h;
                p[2] = lo[2] + static_cast<double>(iz) * h;
                if (!E.contains(p)) continue;
                ++e_cells;
                for (const auto& o : offs) {
                    const int64_t jx = ix + o[0], jy = iy + o[1], jz = iz + o[2];
                    if (jx < 0 || jx >= n[0] || jy < 0 || jy >= n[1] || jz < 0 || jz >= n[2]) continue;
                    value[static_cast<size_t>((jz * n[1] + jy) * n[0] + jx)] += w;
                }
            }
    if (e_cells == 0) throw EmptyE("level set: |E| = 0 on this grid");
    const double mE = static_cast<double>(e_cells) * h * h * h;
    for (double lam : lambdas) {
        int64_t above = 0;
        for (double v : value)
            if (v > lam) ++above;
        LevelSetResult r;
        r.delta = delta;
        r.lambda = lam;
        r.grid_spacing = h;
        r.measure_E = mE;
        r.measure_F = static_cast<double>(above) * h * h * h;
        r.ratio = std::pow(lam, 4) * r.measure_F / std::pow(mE, 3);
        out.push_back(r);
    }
    return out;
}

LevelSetResult circular_average_levelset(const RegionSpec& E, double delta, double lambda,
                                         double spacing, int dimension) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::invalid_argument("circular_average_levelset: need 0 < lambda <= 1");
    return circular_levelset_sweep(E, delta, spacing, dimension, {lambda}).front();
}

std::vector<LevelSetResult> cone_levelset_sweep(const RegionSpec& E, double delta, double spacing,
                                                const std::vector<double>& lambdas) {
    if (!(spacing > 0.0 && spacing <= delta / 2.0))
        throw std::invalid_argument("cone_average_levelset: need spacing <= delta/2");
    if (E.dimension != 2) throw std::invalid_argument("cone_average_levelset: planar E only");

    const double h = spacing;
    const int64_t slices = static_cast<int64_t>(std::floor(1.0 / delta)) + 1;
    std::vector<int64_t> above(lambdas.size(), 0);
    double mE = 0.0;
    for (int64_t k = 0; k < slices; ++k) {
        const double t = 1.0 + static_cast<double>(k) * delta;
        const Field2 f = convolve2(E, t, delta, h);
        mE = static_cast<double>(f.e_cells) * h * h;
        for (size_t li = 0; li < lambdas.size(); ++li) {
            int64_t cnt = 0;
            for (double v : f.value)
                if (v > lambdas[li]) ++cnt;
            above[li] += cnt;
        }
    }
    std::vector<LevelSetResult> out;
    for (size_t li = 0; li < lambdas.size(); ++li) {
        LevelSetResult r;
        r.delta = delta;
        r.lambda = lambdas[li];
        r.grid_spacing = h;
        r.measure_E = mE;
        r.measure_F = static_cast<double>(above[li]) * h * h * delta;
        r.ratio = lambdas[li] * std::pow(r.measure_F, 1.0 / 6.0) / std::sqrt(mE);
        out.push_back(r);
    }
    return out;
}

LevelSetResult cone_average_levelset(const RegionSpec& E, double delta, double lambda,
                                     double spacing) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::invalid_argument("cone_average_levelset: need 0 < lambda <= 1");
    return cone_levelset_sweep(E, delta, spacing, {lambda}).front();
}

RegionSpec focusing_example(double delta) { return RegionSpec::annulus({0.0, 0.0}, 1.0, delta); }

RegionSpec knapp_example(double delta) {
    const double w = std::sqrt(delta);
    return RegionSpec::box({1.0 - delta, -w / 2.0}, {2.0 * delta, w});
}

RegionSpec scaling_example(double delta) { return RegionSpec::ball({1.0, 0.0}, delta); }

} // namespace incidence::estimates
