#pragma once

#include <string>
#include <vector>

#include "halfline/types.hpp"

namespace halfline {

/// A named input data set {V, A, B} used by the tests and emitted by the
/// `fixtures` subcommand.
struct Fixture {
  std::string name;
  std::string description;
  Potential potential;
  BoundaryCondition boundary;
  /// Expected number of bound states counted with multiplicity, -1 if only
  /// known numerically.
  int expected_bound_states = -1;
};

/// Step and exponential potentials, scalar and 2x2, with and without bound
/// states. Layer boundaries sit on multiples of the default inverse grid
/// spacing and every potential vanishes (numerically) well inside [0, 10].
std::vector<Fixture> nontrivial_fixtures();

/// V = 0 with diagonal boundary conditions, where everything is known in
/// closed form.
std::vector<Fixture> zero_potential_fixtures();

std::vector<Fixture> fixture_corpus();

/// V(x) = amplitude sin(omega x) e^{-x}, sampled at spacing dx on [0, 10],
/// Dirichlet condition. Reflection peaks near k = omega / 2, so large omega
/// pushes the data past what the default k grid and Nystrom spacing resolve.
Fixture high_frequency_fixture(double omega, double amplitude = 2.0, double dx = 0.005);

}  // namespace halfline
