#pragma once

#include <span>
#include <vector>

#include "halfline/types.hpp"

namespace halfline {

/// Closed forms for V = 0 with the diagonal boundary A = diag(-sin theta_j),
/// B = diag(cos theta_j).
struct ZeroPotentialValues {
  Mat f0;
  Mat fp0;
  Mat J;
  Mat S;
  std::vector<BoundState> bound_states;
};

ZeroPotentialValues zero_potential_oracle(std::span<const double> thetas, cplx k);

/// Closed-form S on a grid plus the bound states, as a ScatteringData set.
ScatteringData zero_potential_scattering(std::span<const double> thetas, std::span<const double> k_grid);

/// Matrix exponential by scaling and squaring with a diagonal (6,6) Pade
/// approximant.
Mat expm(const Mat& a);

struct StepJostValues {
  Mat f0;
  Mat fp0;
};

/// Exact layer-by-layer propagation of (f, f') from the last boundary down to
/// 0 for a piecewise constant potential.
StepJostValues step_jost_oracle(const StepPotentialSpec& spec, int n, cplx k);

/// Scalar Robin data for V = 0: the F_s kernel of the closed-form S and the
/// boundary condition the inverse problem should return.
struct RobinMarchenko {
  double theta = 0.0;
  double kappa = 0.0;  // cot theta
  double m = 0.0;      // sqrt(2 cot theta)

  /// F_s(y) = -2 cot(theta) e^{-y cot(theta)} for y >= 0 and 0 for y < 0.
  double Fs(double y) const;
  /// F = F_s + M^2 e^{-kappa y} on y >= 0, identically zero.
  double F(double y) const;
  BoundaryCondition boundary() const;
};

RobinMarchenko robin_marchenko_oracle(double theta);

/// Rank-one separable kernel F(y) = c e^{-kappa y} with its closed-form
/// Marchenko solution and potential.
struct SeparableKernel {
  double kappa = 1.0;
  double c = 1.0;

  double F(double y) const;
  double K(double x, double y) const;
  double V(double x) const;
};

}  // namespace halfline
