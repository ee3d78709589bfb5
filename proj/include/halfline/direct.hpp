#pragma once

#include <optional>
#include <span>
#include <vector>

#include "halfline/types.hpp"

namespace halfline {

struct DirectConfig {
  /// Integration starts here when set; otherwise at the potential's x_max.
  std::optional<double> x_max;
  double ode_tol = 1e-10;
  double k_max = 60.0;
  int k_count = 2048;
  double kappa_min = 1e-3;
  double kappa_max = 10.0;
  double kappa_step = 1e-2;
  /// Relative singular-value threshold deciding zeros and multiplicities of
  /// J(i kappa).
  double det_tol = 1e-7;
  int threads = 1;
};

void check_config(const DirectConfig& cfg);

/// Jost solution data at one k. Profiles are filled only for requested x.
struct JostValues {
  cplx k;
  Mat f0;   // f(k, 0)
  Mat fp0;  // f'(k, 0)
  std::vector<double> x;
  std::vector<Mat> f;
  std::vector<Mat> fp;
  /// int_0^inf f(k,x)^† f(k,x) dx, only when requested and Im k > 0.
  Mat gram;
};

/// Integrates -f'' + V f = k^2 f from the truncation radius down to 0 with
/// f ~ e^{ikx} I there. Internally works with g = e^{-ikx} f, which stays
/// bounded for every Im k >= 0.
JostValues jost_solution(const Potential& v, cplx k, const DirectConfig& cfg,
                         std::span<const double> profile_x = {}, bool with_gram = false);

/// J = f(-k*,0)^† B - f'(-k*,0)^† A, given the values at -k*.
Mat jost_matrix(const Mat& f_at_minus_kconj, const Mat& fp_at_minus_kconj, const BoundaryCondition& bc);

/// Convenience: integrates at -k* and forms J(k).
Mat jost_matrix_at(const Potential& v, const BoundaryCondition& bc, cplx k, const DirectConfig& cfg);

struct ScatteringMatrixResult {
  ScatteringData data;  // no bound states
  JostBundle jost;
};

/// S(k) = -J(-k) J(k)^{-1} on the configured symmetric grid.
ScatteringMatrixResult scattering_matrix(const Potential& v, const BoundaryCondition& bc, const DirectConfig& cfg);

struct RegularSolution {
  std::vector<double> x;
  std::vector<Mat> phi;
  std::vector<Mat> dphi;
};

/// phi(k,0) = A, phi'(k,0) = B, integrated forward to each requested x.
RegularSolution regular_solution(const Potential& v, const BoundaryCondition& bc, cplx k,
                                 std::span<const double> x_grid, const DirectConfig& cfg);

/// Psi = f(-k,x) + f(k,x) S(k).
Mat physical_solution(const Mat& f_minus, const Mat& f_plus, const Mat& s);

struct LocatedState {
  double kappa = 0.0;
  int multiplicity = 0;
  Mat P;  // projector onto ker J(i kappa)^†
};

std::vector<LocatedState> locate_bound_states(const Potential& v, const BoundaryCondition& bc,
                                              const DirectConfig& cfg);

/// M_j = B_j^{-1/2} P_j with B_j = (I - P_j) + P_j A_j P_j.
std::vector<BoundState> normalization_matrices(const Potential& v, std::span<const LocatedState> states,
                                               const DirectConfig& cfg);

struct BoundStateSolution {
  double kappa = 0.0;
  std::vector<double> x;
  std::vector<Mat> psi;
  Mat psi0;
  Mat dpsi0;
  /// sup_x |Psi(x)| e^{kappa x}; finite means the columns decay at least
  /// like e^{-kappa x}.
  double decay_envelope = 0.0;
  bool square_integrable = false;
};

/// Psi_j(x) = f(i kappa_j, x) M_j from a Jost profile at k = i kappa_j.
BoundStateSolution bound_state_solution(const JostValues& profile, const Mat& m);

struct DirectResult {
  ScatteringData data;
  JostBundle jost;
  std::vector<LocatedState> located;
};

DirectResult solve_direct(const Potential& v, const BoundaryCondition& bc, const DirectConfig& cfg);

}  // namespace halfline
