#pragma once

// Seeded generators for the property tests. Every test that draws random
// data builds its own Rng from a fixed seed so failures reproduce.

#include <cmath>
#include <random>
#include <vector>

#include "halfline/linalg.hpp"
#include "halfline/types.hpp"

namespace halfline::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  double normal() { return std::normal_distribution<double>()(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

  Mat complex_matrix(int rows, int cols) {
    Mat m(rows, cols);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = cplx(normal(), normal());
    return m;
  }

  Mat hermitian(int n, double scale = 1.0) {
    const Mat g = complex_matrix(n, n);
    return scale * 0.5 * (g + g.adjoint());
  }

  /// Haar-ish unitary from the QR factor of a Gaussian matrix.
  Mat unitary(int n) {
    Eigen::HouseholderQR<Mat> qr(complex_matrix(n, n));
    return qr.householderQ() * Mat::Identity(n, n);
  }

  /// Random selfadjoint boundary condition: a unitary rotation of a diagonal
  /// pair with random angles.
  BoundaryCondition boundary(int n) {
    std::vector<double> theta(static_cast<std::size_t>(n));
    for (double& t : theta) t = uniform(0.05, kPi);
    const BoundaryCondition d = diagonal_boundary(theta);
    const Mat u = unitary(n);
    return validate_boundary(u * d.A() * u.adjoint(), u * d.B() * u.adjoint());
  }

  /// Well-conditioned invertible matrix.
  Mat invertible(int n) { return unitary(n) * (Mat::Identity(n, n) * 1.5 + 0.3 * complex_matrix(n, n) / n); }

 private:
  std::mt19937_64 gen_;
};

inline std::vector<double> angles(std::initializer_list<double> t) { return std::vector<double>(t); }

inline Mat scalar(double v) { return Mat::Constant(1, 1, cplx(v, 0.0)); }

}  // namespace halfline::testing
