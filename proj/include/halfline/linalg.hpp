#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace halfline {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// Relative singular-value cutoff used for every rank and kernel decision.
inline constexpr double kRankTol = 1e-9;

inline Mat identity(int n) { return Mat::Identity(n, n); }

Mat hermitian_part(const Mat& m);

/// Largest entry magnitude.
double max_abs(const Mat& m);

/// Spectral norm (largest singular value).
double norm2(const Mat& m);

bool all_finite(const Mat& m);

/// Singular values in descending order.
Eigen::VectorXd singular_values(const Mat& m);

/// Number of singular values above rel_tol * scale. If scale <= 0 the largest
/// singular value of m is used.
int numerical_rank(const Mat& m, double rel_tol = kRankTol, double scale = 0.0);

/// Orthogonal projector onto the column space of m.
Mat range_projector(const Mat& m, double rel_tol = kRankTol);

/// Orthogonal projector onto the null space of m, counting singular values
/// <= abs_tol as zero.
Mat kernel_projector(const Mat& m, double abs_tol);

/// Principal inverse square root of a hermitian positive definite matrix.
/// Returns false if the smallest eigenvalue is not positive.
bool inverse_sqrt_hpd(const Mat& m, Mat& out, double* min_eigenvalue = nullptr);

/// 2-norm condition number; infinity for singular input.
double condition_number(const Mat& m);

/// Eigen-decomposition of the hermitian part, ascending eigenvalues.
struct HermitianEigen {
  Eigen::VectorXd values;
  Mat vectors;
};
HermitianEigen hermitian_eigen(const Mat& m);

}  // namespace halfline
