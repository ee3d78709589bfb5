#include "halfline/types.hpp"

#include <algorithm>
#include <cmath>

namespace halfline {

Mat BoundaryCondition::stacked() const {
  Mat s(2 * n(), n());
  s << a_, b_;
  return s;
}

BoundaryCondition validate_boundary(const Mat& a, const Mat& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows() || a.rows() == 0)
    throw ScatteringError(ErrorCode::DimensionMismatch, "A and B must be square of equal size");
  if (!all_finite(a) || !all_finite(b))
    throw ScatteringError(ErrorCode::NonFinite, "boundary matrices contain non-finite entries");

  Mat stacked(2 * a.rows(), a.cols());
  stacked << a, b;
  const double scale = std::max(1.0, stacked.squaredNorm() / static_cast<double>(a.rows()));

  const double defect = max_abs(-b.adjoint() * a + a.adjoint() * b);
  if (defect > 1e-12 * scale)
    throw ScatteringError(ErrorCode::SelfadjointnessViolated,
                          "-B^dag A + A^dag B has entry of size " + std::to_string(defect));

  const HermitianEigen gram = hermitian_eigen(a.adjoint() * a + b.adjoint() * b);
  if (!(gram.values(0) > 1e-12))
    throw ScatteringError(ErrorCode::RankDeficient, "A^dag A + B^dag B is not positive definite");

  return BoundaryCondition(a, b);
}

double boundary_distance(const BoundaryCondition& lhs, const BoundaryCondition& rhs) {
  if (lhs.n() != rhs.n())
    throw ScatteringError(ErrorCode::DimensionMismatch, "boundary conditions of different size");
  return norm2(range_projector(lhs.stacked()) - range_projector(rhs.stacked()));
}

bool boundary_equivalent(const BoundaryCondition& lhs, const BoundaryCondition& rhs, double tol) {
  return boundary_distance(lhs, rhs) <= tol;
}

BoundaryCondition transform_boundary(const BoundaryCondition& bc, const Mat& t) {
  return validate_boundary(bc.A() * t, bc.B() * t);
}

BoundaryClass classify_boundary(const BoundaryCondition& bc) {
  const double scale = singular_values(bc.stacked())(0);
  const int n = bc.n();
  BoundaryClass c;
  c.dirichlet = n - numerical_rank(bc.A(), kRankTol, scale);
  c.neumann = n - numerical_rank(bc.B(), kRankTol, scale);
  c.mixed = n - c.dirichlet - c.neumann;
  return c;
}

BoundaryCondition diagonal_boundary(std::span<const double> thetas) {
  const int n = static_cast<int>(thetas.size());
  Mat a = Mat::Zero(n, n);
  Mat b = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    a(j, j) = -std::sin(thetas[j]);
    b(j, j) = std::cos(thetas[j]);
  }
  return validate_boundary(a, b);
}

}  // namespace halfline
