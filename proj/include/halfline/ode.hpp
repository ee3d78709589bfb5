#pragma once

#include <functional>

#include "halfline/linalg.hpp"

namespace halfline {

/// Adaptive eighth-order Dormand-Prince integrator (DOP853 tableau with the
/// 5th/3rd order blended error estimate) for complex state vectors. The
/// integrator may run in either direction and keeps its step size between
/// successive integrate() calls so that piecewise integration across
/// breakpoints does not restart from scratch.
class Dop853 {
 public:
  using Rhs = std::function<void(double x, const Vec& y, Vec& dydx)>;

  struct Options {
    double rtol = 1e-10;
    double atol = 1e-10;
    long max_steps = 2'000'000;
  };

  Dop853(Rhs rhs, Options opts);

  /// Advances y from x0 to x1. Throws IntegrationFailure on step-size
  /// underflow or when the step budget is exhausted, NonFinite if the
  /// solution blows up.
  void integrate(Vec& y, double x0, double x1);

  long accepted_steps() const { return accepted_; }
  long rejected_steps() const { return rejected_; }

 private:
  double initial_step(const Vec& y, double x0, double dir, double hmax);
  double attempt(const Vec& y, double x, double hs);

  Rhs rhs_;
  Options opts_;
  double h_ = 0.0;
  long accepted_ = 0;
  long rejected_ = 0;
  Vec k1_, k2_, k3_, k4_, k5_, k6_, k7_, k8_, k9_, k10_, k11_, k12_, stage_, incr_, ynew_, fnew_;
};

}  // namespace halfline
