#pragma once

#include <span>
#include <vector>

#include "halfline/linalg.hpp"

namespace halfline {

enum class QuadRule {
  Trapezoid,
  /// Trapezoid with fourth-order Gregory end corrections (3/8, 7/6, 23/24).
  Gregory,
};

/// Weights for `count` equally spaced nodes with spacing h covering
/// [y_0, y_{count-1}]. Short node sets fall back to Simpson-type rules.
std::vector<double> uniform_weights(int count, double h, QuadRule rule);

/// Voronoi cell widths for an ascending, possibly non-uniform grid. On a
/// uniform grid every weight equals the spacing, which makes the sum a
/// midpoint rule over the grid extended by half a cell at each end.
std::vector<double> cell_weights(std::span<const double> grid);

/// Integral of g(y) e^{iky} over [y0, y0 + (N-1)h] where g is the piecewise
/// linear interpolant of `values` (exact for that interpolant, any complex k).
Mat filon_linear(std::span<const Mat> values, double y0, double h, cplx k);

/// Fourth-order finite-difference derivative on a uniform grid (central in
/// the interior, one-sided near the ends). order = 2 uses the classic
/// three-point stencils instead.
std::vector<Mat> uniform_derivative(std::span<const Mat> values, double h, int order = 4);

}  // namespace halfline
