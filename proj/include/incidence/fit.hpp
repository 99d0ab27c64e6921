#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

namespace incidence::fit {

struct DegenerateInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> points; // (log x, log y)
};

// Ordinary least squares on (ln x, ln y). Needs >= 3 positive points with
// at least two distinct x.
FitResult fit_exponent(const std::vector<std::pair<double, double>>& points);

} // namespace incidence::fit
