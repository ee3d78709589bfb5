#include "halfline/linalg.hpp"
#include "halfline/errors.hpp"

#include <cmath>
#include <limits>

namespace halfline {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SelfadjointnessViolated: return "SelfadjointnessViolated";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::AsymmetricGrid: return "AsymmetricGrid";
    case ErrorCode::BadBoundState: return "BadBoundState";
    case ErrorCode::IntegrationFailure: return "IntegrationFailure";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::SingularJost: return "SingularJost";
    case ErrorCode::ScanInconclusive: return "ScanInconclusive";
    case ErrorCode::ClusterUnresolved: return "ClusterUnresolved";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::TailNotSettled: return "TailNotSettled";
    case ErrorCode::SingularOperator: return "SingularOperator";
    case ErrorCode::TruncationTooShort: return "TruncationTooShort";
    case ErrorCode::SpectralFailure: return "SpectralFailure";
    case ErrorCode::PhaseUnwrapFailure: return "PhaseUnwrapFailure";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Mat hermitian_part(const Mat& m) { return 0.5 * (m + m.adjoint()); }

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double norm2(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

bool all_finite(const Mat& m) { return m.allFinite(); }

Eigen::VectorXd singular_values(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues();
}

int numerical_rank(const Mat& m, double rel_tol, double scale) {
  const Eigen::VectorXd s = singular_values(m);
  if (s.size() == 0) return 0;
  const double ref = scale > 0.0 ? scale : s(0);
  if (ref == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * ref) ++r;
  return r;
}

Mat range_projector(const Mat& m, double rel_tol) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU);
  const Eigen::VectorXd& s = svd.singularValues();
  const int rows = static_cast<int>(m.rows());
  Mat p = Mat::Zero(rows, rows);
  if (s.size() == 0 || s(0) == 0.0) return p;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > rel_tol * s(0)) {
      const Vec u = svd.matrixU().col(i);
      p += u * u.adjoint();
    }
  }
  return p;
}

Mat kernel_projector(const Mat& m, double abs_tol) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const int cols = static_cast<int>(m.cols());
  Mat p = Mat::Zero(cols, cols);
  for (int i = 0; i < cols; ++i) {
    const double si = i < s.size() ? s(i) : 0.0;
    if (si <= abs_tol) {
      const Vec v = svd.matrixV().col(i);
      p += v * v.adjoint();
    }
  }
  return p;
}

HermitianEigen hermitian_eigen(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(m));
  return {es.eigenvalues(), es.eigenvectors()};
}

bool inverse_sqrt_hpd(const Mat& m, Mat& out, double* min_eigenvalue) {
  const HermitianEigen he = hermitian_eigen(m);
  const double lo = he.values.size() ? he.values(0) : 0.0;
  if (min_eigenvalue) *min_eigenvalue = lo;
  if (!(lo > 0.0)) return false;
  Eigen::VectorXd d = he.values.cwiseSqrt().cwiseInverse();
  out = he.vectors * d.asDiagonal() * he.vectors.adjoint();
  return true;
}

double condition_number(const Mat& m) {
  const Eigen::VectorXd s = singular_values(m);
  if (s.size() == 0) return 1.0;
  const double lo = s(s.size() - 1);
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / lo;
}

}  // namespace halfline
