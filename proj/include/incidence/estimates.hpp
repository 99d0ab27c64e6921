#pragma once

#include <stdexcept>
#include <vector>

#include "incidence/probab.hpp"

namespace incidence::estimates {

using probab::RegionSpec;

struct EmptyE : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct LevelSetResult {
    double delta = 0.0;
    double lambda = 0.0;
    double measure_E = 0.0;
    double measure_F = 0.0;
    double ratio = 0.0; // lambda^{d+1} |F| / |E|^d, or the cone quotient
    double grid_spacing = 0.0;
};

// Superlevel set of the spherical average (chi_E * sigma_delta) on a grid of
// the stated spacing, sigma_delta the unit-mass uniform measure on the
// delta-shell of the unit sphere. Quadrature nodes are the grid cells of the
// shell, weights normalized to total mass one. ratio = lambda^{d+1}|F|/|E|^d.
LevelSetResult circular_average_levelset(const RegionSpec& E, double delta, double lambda,
                                         double spacing, int dimension);

// Same field evaluated once, measured against a list of levels.
std::vector<LevelSetResult> circular_levelset_sweep(const RegionSpec& E, double delta,
                                                    double spacing, int dimension,
                                                    const std::vector<double>& lambdas);

// Cone version: slices t on a delta-grid of [1,2], value at (x,t) is the
// normalized average of chi_E over the delta-shell of C(x,t); F measured in
// 3D with t-cell measure delta. ratio = lambda |F|^{1/6} / |E|^{1/2}.
LevelSetResult cone_average_levelset(const RegionSpec& E, double delta, double lambda,
                                     double spacing);
std::vector<LevelSetResult> cone_levelset_sweep(const RegionSpec& E, double delta, double spacing,
                                                const std::vector<double>& lambdas);

// The three canonical extremal inputs at scale delta: the delta-shell of the
// unit circle, a delta x sqrt(delta) plate tangent to it, and a delta-ball
// on it.
RegionSpec focusing_example(double delta);
RegionSpec knapp_example(double delta);
RegionSpec scaling_example(double delta);

} // namespace incidence::estimates
