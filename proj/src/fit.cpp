#include "incidence/fit.hpp"

#include <cmath>

namespace incidence::fit {

FitResult fit_exponent(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_exponent: need >= 3 points");
    FitResult out;
    for (auto [x, y] : points) {
        if (!(x > 0.0 && y > 0.0)) throw std::invalid_argument("fit_exponent: points must be positive");
        out.points.emplace_back(std::log(x), std::log(y));
    }
    const double n = static_cast<double>(out.points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (auto [lx, ly] : out.points) {
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double var_x = sxx - sx * sx / n;
    if (var_x <= 1e-15) throw DegenerateInput("fit_exponent: all x equal");
    const double cov = sxy - sx * sy / n;
    const double var_y = syy - sy * sy / n;
    out.slope = cov / var_x;
    out.intercept = (sy - out.slope * sx) / n;
    out.r_squared = var_y > 0.0 ? (cov * cov) / (var_x * var_y) : 1.0;
    return out;
}

} // namespace incidence::fit
