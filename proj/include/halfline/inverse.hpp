#pragma once

#include <optional>
#include <span>
#include <vector>

#include "halfline/quadrature.hpp"
#include "halfline/types.hpp"

namespace halfline {

struct InverseConfig {
  /// Reconstruction interval [0, x_max].
  double x_max = 10.0;
  /// Kernel truncation; defaults to 2 x_max.
  std::optional<double> y_max;
  /// Spacing of the y and x grids.
  double h = 0.025;
  /// Tail window k_lo <= |k| <= k_max; defaults to half the grid extent.
  std::optional<double> k_lo;
  int tail_order = 4;
  double tail_lambda = 1.0;
  QuadRule quad = QuadRule::Gregory;
  double solver_tol = 1e-10;
  /// Order of the finite differences used for V = -2 d/dx K(x,x).
  int fd_order = 4;
  /// Largest |F(y_max)| accepted before the truncation is declared too short.
  /// The effective threshold never drops below the bound on what the finite
  /// k grid can resolve (see InverseDiagnostics::fourier_tail_bound).
  double truncation_tol = 1e-8;
  int threads = 1;

  double y_max_value() const { return y_max.value_or(2.0 * x_max); }
};

void check_config(const InverseConfig& cfg);

/// L with y_max = L h rounded to an even count.
int kernel_half_count(const InverseConfig& cfg);

/// Large-k model S(k) ~ S_inf + sum_m C_m / (lambda + ik)^m fitted on the
/// tail window. C_1 is the 1/(ik) coefficient G_1.
struct TailFit {
  Mat S_inf;
  Mat G1;
  std::vector<Mat> C;
  double lambda = 1.0;
  double k_lo = 0.0;
  double k_max = 0.0;
  /// RMS misfit over the window relative to max |S|.
  double residual = 0.0;
  /// Distance of the raw S_inf eigenvalues from +-1 before snapping.
  double involution_defect = 0.0;

  Mat model(double k) const;
  /// Inverse Fourier transform of model(k), right-continuous at y = 0.
  Mat model_transform(double y, bool derivative = false) const;
};

TailFit tail_fit(const ScatteringData& s, const InverseConfig& cfg);

/// F_s(y) = (1/2pi) int [S(k) - S_inf] e^{iky} dk: the fitted tail is
/// transformed analytically and the remainder by the grid sum. With
/// derivative set returns F_s'(y).
/// With taper set, the grid remainder is rolled off by cos^2 over
/// [k_max/2, k_max], which trades the 1/(k_max y) ringing of the hard cutoff
/// for smoothing on the scale 1/k_max.
std::vector<Mat> fourier_Fs(const ScatteringData& s, const TailFit& tail, std::span<const double> y,
                            bool derivative = false, bool taper = false);

/// F(y) = F_s(y) + sum_j M_j^2 e^{-kappa_j y} (or its derivative).
std::vector<Mat> assemble_F(std::span<const double> y, std::span<const Mat> fs,
                            std::span<const BoundState> bound_states, bool derivative = false);

/// Nystrom matrix I + W F at x = m h, with F sampled at l h, l = 0..L. Block
/// (i, j) multiplies K(x, z_i) and holds w_i F(z_i + y_j).
Mat marchenko_operator(std::span<const Mat> f, double h, int m, QuadRule rule);

/// The similar hermitian form I + W^{1/2} F W^{1/2}.
Mat marchenko_symmetric_operator(std::span<const Mat> f, double h, int m, QuadRule rule);

struct MarchenkoRow {
  double x = 0.0;
  double h = 0.0;
  std::vector<Mat> K;   // K(x, x + j h)
  std::vector<Mat> Kx;  // d/dx K(x, x + j h) when derivatives were supplied
  double residual = 0.0;
  double rcond = 1.0;
};

/// Solves the discretized Marchenko equation at x = m h on [x, L h / 2].
/// df (possibly empty) additionally gives the x-derivative of K.
MarchenkoRow solve_marchenko(std::span<const Mat> f, std::span<const Mat> df, double h, int m,
                             QuadRule rule, double solver_tol);

/// V(x_m) = -2 d/dx K(x_m, x_m), symmetrized, as a sampled potential.
Potential recover_potential(std::span<const Mat> k_diag, double h, int fd_order);

BoundaryCondition recover_boundary(const Mat& s_inf, const Mat& g1, const Mat& k00);

/// f(k, x) = e^{ikx} I + int_x K(x,y) e^{iky} dy.
Mat reconstruct_jost(const MarchenkoRow& row, cplx k, QuadRule rule);

/// f'(k, x) = ik e^{ikx} I - K(x,x) e^{ikx} + int_x K_x(x,y) e^{iky} dy.
Mat reconstruct_jost_derivative(const MarchenkoRow& row, cplx k, QuadRule rule);

struct InverseDiagnostics {
  double tail_residual = 0.0;
  double involution_defect = 0.0;
  double F_at_ymax = 0.0;
  /// (k_max / pi) max |S - S_inf - model| at the grid ends: size of the
  /// Fourier content cut off beyond k_max, assuming 1/k^2 decay.
  double fourier_tail_bound = 0.0;
  double Fs_hermiticity = 0.0;
  double max_marchenko_residual = 0.0;
  double min_rcond = 1.0;
};

struct RecoveredInput {
  Potential V;
  BoundaryCondition bc;
  TailFit tail;
  MarchenkoKernel kernel;
  std::vector<Mat> dF;     // F'(y) on [0, y_max]
  MarchenkoRow row0;       // K(0, .) with its x-derivative
  std::vector<Mat> K_diag; // K(x_m, x_m)
  InverseDiagnostics diagnostics;
};

RecoveredInput invert(const ScatteringData& s, const InverseConfig& cfg);

/// f(k,0), f'(k,0) and J(k) rebuilt from the recovered kernel on a grid.
JostBundle reconstructed_jost_bundle(const RecoveredInput& rec, std::span<const double> k_grid, QuadRule rule);

/// Same at a single complex k (e.g. i kappa).
Mat reconstructed_jost_matrix(const RecoveredInput& rec, cplx k, QuadRule rule);

}  // namespace halfline
