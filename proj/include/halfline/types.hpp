#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "halfline/errors.hpp"
#include "halfline/linalg.hpp"

namespace halfline {

// ---------------------------------------------------------------------------
// Boundary condition  -B^† psi(0) + A^† psi'(0) = 0
// ---------------------------------------------------------------------------

/// A validated selfadjoint boundary pair (A, B). The pair is only defined up
/// to right multiplication by an invertible matrix; nothing here picks a
/// canonical representative.
class BoundaryCondition {
 public:
  const Mat& A() const { return a_; }
  const Mat& B() const { return b_; }
  int n() const { return static_cast<int>(a_.rows()); }

  /// Stacked 2n x n matrix [A; B].
  Mat stacked() const;

 private:
  BoundaryCondition(Mat a, Mat b) : a_(std::move(a)), b_(std::move(b)) {}
  friend BoundaryCondition validate_boundary(const Mat& a, const Mat& b);

  Mat a_;
  Mat b_;
};

/// Checks -B^†A + A^†B = 0 (max entry <= 1e-12) and positivity of A^†A + B^†B.
BoundaryCondition validate_boundary(const Mat& a, const Mat& b);

/// Spectral-norm distance between the orthogonal projectors onto the column
/// spaces of [A1; B1] and [A2; B2]; zero iff the pairs are equivalent.
double boundary_distance(const BoundaryCondition& lhs, const BoundaryCondition& rhs);

/// Same column space of [A1; B1] and [A2; B2] up to tol.
bool boundary_equivalent(const BoundaryCondition& lhs, const BoundaryCondition& rhs, double tol = 1e-9);

/// (AT, BT) for invertible T.
BoundaryCondition transform_boundary(const BoundaryCondition& bc, const Mat& t);

struct BoundaryClass {
  int dirichlet = 0;
  int neumann = 0;
  int mixed = 0;
  bool operator==(const BoundaryClass&) const = default;
};

/// (n_D, n_N, n_M) from rank counts of A and B.
BoundaryClass classify_boundary(const BoundaryCondition& bc);

/// Diagonal representative A = diag(-sin theta_j), B = diag(cos theta_j).
BoundaryCondition diagonal_boundary(std::span<const double> thetas);

// ---------------------------------------------------------------------------
// Potential
// ---------------------------------------------------------------------------

/// Piecewise constant hermitian layers on [0, x_1], [x_1, x_2], ... with zero
/// potential past the last boundary.
struct StepPotentialSpec {
  std::vector<double> boundaries;  // x_1 < x_2 < ... < x_m, all > 0
  std::vector<Mat> layers;         // one per boundary
};

struct ZeroForm {};

/// V(x) = amplitude * exp(-decay * x).
struct ExponentialForm {
  Mat amplitude;
  double decay = 1.0;
};

struct SampledForm {
  std::vector<double> x;
  std::vector<Mat> values;
};

/// Hermitian matrix potential on the truncated half line [0, x_max]. Sampled
/// potentials are linearly interpolated between samples; every form is zero
/// beyond x_max.
class Potential {
 public:
  using Form = std::variant<ZeroForm, StepPotentialSpec, ExponentialForm, SampledForm>;

  int n() const { return n_; }
  double x_max() const { return x_max_; }
  const Form& form() const { return form_; }

  /// Writes V(x) into out (resized if needed). Allocation free when out
  /// already has the right shape.
  void value(double x, Mat& out) const;
  Mat operator()(double x) const;

  /// Interior points in (0, x_max) where V or its derivative may jump. The
  /// integrators never step across one of these.
  std::vector<double> breakpoints() const;

  /// Discretized  int_0^{x_max} (1+x) |V(x)| dx  with the operator norm.
  double first_moment() const;

  bool is_zero() const { return std::holds_alternative<ZeroForm>(form_); }

  std::string name() const;

 private:
  Potential(int n, double x_max, Form form) : n_(n), x_max_(x_max), form_(std::move(form)) {}
  friend Potential validate_potential(const SampledForm&, double);
  friend Potential zero_potential(int, double);
  friend Potential step_potential(const StepPotentialSpec&, double);
  friend Potential exponential_potential(const Mat&, double, double);

  int n_;
  double x_max_;
  Form form_;
};

/// Validates raw samples (ascending x in [0, x_max], common square size,
/// hermitian to 1e-12, finite). Samples are stored symmetrized. x_max <= 0
/// means "last sample".
Potential validate_potential(const SampledForm& raw, double x_max = 0.0);
Potential zero_potential(int n, double x_max = 40.0);
Potential step_potential(const StepPotentialSpec& spec, double x_max = 40.0);
Potential exponential_potential(const Mat& amplitude, double decay, double x_max = 40.0);

// ---------------------------------------------------------------------------
// Scattering data
// ---------------------------------------------------------------------------

struct BoundState {
  double kappa = 0.0;
  Mat M;
  int multiplicity = 0;
};

/// Validates hermiticity, nonnegativity and computes the multiplicity from
/// the rank of M.
BoundState validate_bound_state(double kappa, const Mat& m);

struct ScatteringData {
  int n = 0;
  std::vector<double> k_grid;
  std::vector<Mat> S;
  std::vector<BoundState> bound_states;

  /// Sum of multiplicities.
  int bound_state_count() const;
  /// Index of -k_grid[i].
  std::size_t mirror(std::size_t i) const { return k_grid.size() - 1 - i; }
};

/// Shape, grid symmetry and bound-state checks. Deep Marchenko-class checks
/// live in characterize.hpp.
ScatteringData validate_scattering_data(ScatteringData raw);

/// Symmetric grid with `count` points spanning [-k_max, k_max]. For even counts
/// k = 0 is not a node.
std::vector<double> symmetric_k_grid(double k_max, int count);

struct JostBundle {
  std::vector<double> k_grid;
  std::vector<Mat> f0;   // f(k, 0)
  std::vector<Mat> fp0;  // f'(k, 0)
  std::vector<Mat> J;    // J(k)
};

/// max_k |J(k) - (f(-k,0)^† B - f'(-k,0)^† A)|.
double jost_bundle_defect(const JostBundle& bundle, const BoundaryCondition& bc);

/// Marchenko data on the uniform grid y_l = l*h. Fs is stored on
/// [-y_max, y_max] (index l + L), F on [0, y_max]; K rows start at y = x.
struct MarchenkoKernel {
  double h = 0.0;
  int half_count = 0;  // L, so y_max = L*h
  std::vector<Mat> Fs;
  std::vector<Mat> F;
  std::vector<double> x_nodes;
  std::vector<std::vector<Mat>> K;  // K[m][j] = K(x_m, x_m + j*h)

  double y_max() const { return h * half_count; }
  const Mat& Fs_at(int l) const { return Fs[static_cast<std::size_t>(l + half_count)]; }
};

}  // namespace halfline
