#include "halfline/fixtures.hpp"

#include <cmath>

namespace halfline {

namespace {

constexpr double kFixtureRadius = 10.0;

Mat scalar(double v) { return Mat::Constant(1, 1, cplx(v, 0.0)); }

Mat mat2(cplx a, cplx b, cplx c, cplx d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

BoundaryCondition thetas(std::initializer_list<double> t) {
  const std::vector<double> v(t);
  return diagonal_boundary(v);
}

/// Diagonal boundary conjugated by a fixed unitary, so A and B are full
/// matrices that still commute.
BoundaryCondition rotated_thetas(double t1, double t2, double angle) {
  Mat u(2, 2);
  u << std::cos(angle), -std::sin(angle) * kI, -std::sin(angle) * kI, std::cos(angle);
  const BoundaryCondition d = thetas({t1, t2});
  return validate_boundary(u * d.A() * u.adjoint(), u * d.B() * u.adjoint());
}

}  // namespace

std::vector<Fixture> nontrivial_fixtures() {
  std::vector<Fixture> out;
  {
    StepPotentialSpec spec{{1.0, 2.0}, {scalar(2.0), scalar(1.0)}};
    out.push_back({"step_repulsive_dirichlet", "scalar repulsive two-layer step, Dirichlet",
                   step_potential(spec, kFixtureRadius), thetas({kPi}), 0});
  }
  {
    StepPotentialSpec spec{{1.5}, {scalar(-4.0)}};
    out.push_back({"step_well_dirichlet", "scalar attractive well, Dirichlet, one bound state",
                   step_potential(spec, kFixtureRadius), thetas({kPi}), 1});
  }
  out.push_back({"exp_robin", "scalar attractive exponential, Robin theta = pi/4, one bound state",
                 exponential_potential(scalar(-1.5), 2.0, kFixtureRadius), thetas({kPi / 4.0}), 1});
  {
    StepPotentialSpec spec{{1.0, 2.0},
                           {mat2(1.5, 0.5, 0.5, 0.5), mat2(0.5, cplx(0.0, 0.2), cplx(0.0, -0.2), 0.3)}};
    out.push_back({"step_2x2_mixed", "2x2 coupled repulsive step, rotated Dirichlet/Robin(2pi/3) boundary",
                   step_potential(spec, kFixtureRadius), rotated_thetas(kPi, 2.0 * kPi / 3.0, 0.3), 0});
  }
  out.push_back({"exp_2x2_bound", "2x2 coupled attractive exponential, Robin pi/4 and Dirichlet, bound state",
                 exponential_potential(mat2(-2.0, 0.5, 0.5, -1.0), 2.0, kFixtureRadius), thetas({kPi / 4.0, kPi}), -1});
  return out;
}

std::vector<Fixture> zero_potential_fixtures() {
  std::vector<Fixture> out;
  out.push_back({"zero_dirichlet", "V = 0, Dirichlet", zero_potential(1, kFixtureRadius), thetas({kPi}), 0});
  out.push_back({"zero_neumann", "V = 0, Neumann", zero_potential(1, kFixtureRadius), thetas({kPi / 2.0}), 0});
  out.push_back({"zero_robin_pi4", "V = 0, Robin theta = pi/4", zero_potential(1, kFixtureRadius), thetas({kPi / 4.0}), 1});
  out.push_back({"zero_mixed_2x2", "V = 0, diag(Dirichlet, Robin pi/4)", zero_potential(2, kFixtureRadius),
                 thetas({kPi, kPi / 4.0}), 1});
  return out;
}

std::vector<Fixture> fixture_corpus() {
  std::vector<Fixture> out = zero_potential_fixtures();
  for (Fixture& f : nontrivial_fixtures()) out.push_back(std::move(f));
  return out;
}

Fixture high_frequency_fixture(double omega, double amplitude, double dx) {
  SampledForm raw;
  const int count = static_cast<int>(std::lround(kFixtureRadius / dx));
  for (int i = 0; i <= count; ++i) {
    const double x = i * dx;
    raw.x.push_back(x);
    raw.values.push_back(scalar(amplitude * std::sin(omega * x) * std::exp(-x)));
  }
  return {"high_frequency", "scalar sin(omega x) e^{-x} oscillation, Dirichlet", validate_potential(raw, kFixtureRadius),
          thetas({kPi}), -1};
}

}  // namespace halfline
