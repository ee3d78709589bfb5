#include "halfline/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace halfline {

ZeroPotentialValues zero_potential_oracle(std::span<const double> thetas, cplx k) {
  const int n = static_cast<int>(thetas.size());
  ZeroPotentialValues out;
  out.f0 = identity(n);
  out.fp0 = kI * k * identity(n);
  out.J = Mat::Zero(n, n);
  out.S = Mat::Zero(n, n);
  // Channels sharing the same kappa form one bound state of higher rank.
  // cot(theta) below kNeumannCot is cos(pi/2) rounding, not a bound state.
  constexpr double kNeumannCot = 1e-12;
  std::vector<double> kappas;
  for (int j = 0; j < n; ++j) {
    const double c = std::cos(thetas[j]), s = std::sin(thetas[j]);
    out.J(j, j) = c + kI * k * s;
    out.S(j, j) = -(c - kI * k * s) / (c + kI * k * s);
    if (s > 0.0 && c / s > kNeumannCot) kappas.push_back(c / s);
  }
  std::sort(kappas.begin(), kappas.end());
  kappas.erase(std::unique(kappas.begin(), kappas.end()), kappas.end());
  for (double kap : kappas) {
    Mat mj = Mat::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      const double s = std::sin(thetas[j]);
      if (s > 0.0 && std::cos(thetas[j]) / s == kap) mj(j, j) = std::sqrt(2.0 * kap);
    }
    out.bound_states.push_back(validate_bound_state(kap, mj));
  }
  return out;
}

ScatteringData zero_potential_scattering(std::span<const double> thetas, std::span<const double> k_grid) {
  ScatteringData d;
  d.n = static_cast<int>(thetas.size());
  d.k_grid.assign(k_grid.begin(), k_grid.end());
  for (double k : k_grid) d.S.push_back(zero_potential_oracle(thetas, k).S);
  d.bound_states = zero_potential_oracle(thetas, 1.0).bound_states;
  return validate_scattering_data(std::move(d));
}

Mat expm(const Mat& a) {
  constexpr int p = 6;
  double c[p + 1];
  c[0] = 1.0;
  for (int j = 1; j <= p; ++j) c[j] = c[j - 1] * (p - j + 1) / (j * (2.0 * p - j + 1));
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const Mat x = a / std::ldexp(1.0, squarings);
  const Eigen::Index d = a.rows();
  Mat num = c[0] * Mat::Identity(d, d);
  Mat den = num;
  Mat power = Mat::Identity(d, d);
  for (int j = 1; j <= p; ++j) {
    power = power * x;
    num += c[j] * power;
    den += ((j % 2) ? -c[j] : c[j]) * power;
  }
  Mat r = den.partialPivLu().solve(num);
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

StepJostValues step_jost_oracle(const StepPotentialSpec& spec, int n, cplx k) {
  StepJostValues out;
  const std::size_t layers = spec.boundaries.size();
  const double top = layers ? spec.boundaries.back() : 0.0;
  const cplx phase = std::exp(kI * k * top);
  Mat y(2 * n, n);
  y.topRows(n) = phase * identity(n);
  y.bottomRows(n) = kI * k * phase * identity(n);
  for (std::size_t l = layers; l-- > 0;) {
    const double lo = l ? spec.boundaries[l - 1] : 0.0;
    const double width = spec.boundaries[l] - lo;
    Mat companion = Mat::Zero(2 * n, 2 * n);
    companion.topRightCorner(n, n) = identity(n);
    companion.bottomLeftCorner(n, n) = spec.layers[l] - k * k * identity(n);
    y = expm(-width * companion) * y;
  }
  out.f0 = y.topRows(n);
  out.fp0 = y.bottomRows(n);
  return out;
}

double RobinMarchenko::Fs(double y) const {
  if (y < 0.0) return 0.0;
  return -2.0 * kappa * std::exp(-kappa * y);
}

double RobinMarchenko::F(double y) const { return Fs(y) + m * m * std::exp(-kappa * y); }

BoundaryCondition RobinMarchenko::boundary() const {
  const double th[1] = {theta};
  return diagonal_boundary(th);
}

RobinMarchenko robin_marchenko_oracle(double theta) {
  RobinMarchenko r;
  r.theta = theta;
  r.kappa = std::cos(theta) / std::sin(theta);
  if (!(r.kappa > 0.0)) throw ScatteringError(ErrorCode::DimensionMismatch, "Robin oracle needs cot(theta) > 0");
  r.m = std::sqrt(2.0 * r.kappa);
  return r;
}

double SeparableKernel::F(double y) const { return c * std::exp(-kappa * y); }

double SeparableKernel::K(double x, double y) const {
  return -c * std::exp(-kappa * (x + y)) / (1.0 + c / (2.0 * kappa) * std::exp(-2.0 * kappa * x));
}

double SeparableKernel::V(double x) const {
  const double u = std::exp(-2.0 * kappa * x);
  const double d = 1.0 + c / (2.0 * kappa) * u;
  return -4.0 * kappa * c * u / (d * d);
}

}  // namespace halfline
