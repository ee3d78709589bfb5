#include "halfline/quadrature.hpp"
#include "halfline/errors.hpp"

#include <cmath>

namespace halfline {

std::vector<double> uniform_weights(int count, double h, QuadRule rule) {
  std::vector<double> w(static_cast<std::size_t>(std::max(count, 0)), h);
  switch (count) {
    case 0: return w;
    case 1: w[0] = 0.0; return w;
    case 2: w = {0.5 * h, 0.5 * h}; return w;
    case 3: w = {h / 3.0, 4.0 * h / 3.0, h / 3.0}; return w;
    case 4: w = {3.0 * h / 8.0, 9.0 * h / 8.0, 9.0 * h / 8.0, 3.0 * h / 8.0}; return w;
    case 5: w = {h / 3.0, 4.0 * h / 3.0, 2.0 * h / 3.0, 4.0 * h / 3.0, h / 3.0}; return w;
    default: break;
  }
  const std::size_t n = w.size();
  if (rule == QuadRule::Trapezoid) {
    w.front() = w.back() = 0.5 * h;
    return w;
  }
  constexpr double g0 = 3.0 / 8.0, g1 = 7.0 / 6.0, g2 = 23.0 / 24.0;
  w[0] = w[n - 1] = g0 * h;
  w[1] = w[n - 2] = g1 * h;
  w[2] = w[n - 3] = g2 * h;
  return w;
}

std::vector<double> cell_weights(std::span<const double> grid) {
  const std::size_t n = grid.size();
  std::vector<double> w(n, 0.0);
  if (n < 2) return w;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i == 0 ? grid[0] - (grid[1] - grid[0]) : grid[i - 1];
    const double right = i + 1 == n ? grid[n - 1] + (grid[n - 1] - grid[n - 2]) : grid[i + 1];
    w[i] = 0.5 * (right - left);
  }
  return w;
}

namespace {

// E1(z) = (e^z - 1)/z,  E2(z) = (e^z (z - 1) + 1)/z^2 with series near zero.
void filon_moments(cplx z, cplx& e1, cplx& e2) {
  if (std::abs(z) < 0.5) {
    e1 = 0.0;
    e2 = 0.0;
    cplx term = 1.0;  // z^j / j!
    for (int j = 0; j < 20; ++j) {
      e1 += term / static_cast<double>(j + 1);
      e2 += term / static_cast<double>(j + 2);
      term *= z / static_cast<double>(j + 1);
    }
    return;
  }
  const cplx ez = std::exp(z);
  e1 = (ez - 1.0) / z;
  e2 = (ez * (z - 1.0) + 1.0) / (z * z);
}

}  // namespace

Mat filon_linear(std::span<const Mat> values, double y0, double h, cplx k) {
  if (values.empty()) return Mat();
  Mat acc = Mat::Zero(values[0].rows(), values[0].cols());
  if (values.size() < 2) return acc;
  cplx e1, e2;
  filon_moments(kI * k * h, e1, e2);
  const cplx alpha = h * (e1 - e2);
  const cplx beta = h * e2;
  const cplx step = std::exp(kI * k * h);
  cplx phase = std::exp(kI * k * y0);
  for (std::size_t j = 0; j + 1 < values.size(); ++j) {
    acc += phase * (alpha * values[j] + beta * values[j + 1]);
    phase *= step;
  }
  return acc;
}

std::vector<Mat> uniform_derivative(std::span<const Mat> f, double h, int order) {
  const std::size_t n = f.size();
  std::vector<Mat> d(n);
  if (n < 2) {
    for (auto& m : d) m = Mat::Zero(f[0].rows(), f[0].cols());
    return d;
  }
  if (order == 2 || n < 5) {
    if (n == 2) {
      d[0] = d[1] = (f[1] - f[0]) / h;
      return d;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
  }
  for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
  d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
  d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * h);
  d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * h);
  return d;
}

}  // namespace halfline
