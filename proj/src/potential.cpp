#include "halfline/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace halfline {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double hermitian_norm(const Mat& v) {
  if (v.rows() == 1) return std::abs(v(0, 0));
  const HermitianEigen he = hermitian_eigen(v);
  return std::max(std::abs(he.values(0)), std::abs(he.values(he.values.size() - 1)));
}

void require_hermitian(const Mat& v, const char* what) {
  if (!all_finite(v)) throw ScatteringError(ErrorCode::NonFiniteSample, std::string(what) + " is not finite");
  if (max_abs(v - v.adjoint()) > 1e-12)
    throw ScatteringError(ErrorCode::NotHermitian, std::string(what) + " is not hermitian");
}

}  // namespace

void Potential::value(double x, Mat& out) const {
  if (out.rows() != n_ || out.cols() != n_) out.resize(n_, n_);
  if (x > x_max_ || x < 0.0) {
    out.setZero();
    return;
  }
  std::visit(overloaded{
                 [&](const ZeroForm&) { out.setZero(); },
                 [&](const StepPotentialSpec& s) {
                   const auto it = std::upper_bound(s.boundaries.begin(), s.boundaries.end(), x);
                   if (it == s.boundaries.end()) {
                     out.setZero();
                   } else {
                     out = s.layers[static_cast<std::size_t>(it - s.boundaries.begin())];
                   }
                 },
                 [&](const ExponentialForm& e) { out = e.amplitude * std::exp(-e.decay * x); },
                 [&](const SampledForm& s) {
                   if (x <= s.x.front()) {
                     out = s.values.front();
                     return;
                   }
                   if (x > s.x.back()) {
                     out.setZero();
                     return;
                   }
                   const auto it = std::upper_bound(s.x.begin(), s.x.end(), x);
                   const std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - s.x.begin()),
                                                                s.x.size() - 1);
                   const std::size_t lo = hi - 1;
                   const double t = (x - s.x[lo]) / (s.x[hi] - s.x[lo]);
                   out = (1.0 - t) * s.values[lo] + t * s.values[hi];
                 },
             },
             form_);
}

Mat Potential::operator()(double x) const {
  Mat out(n_, n_);
  value(x, out);
  return out;
}

std::vector<double> Potential::breakpoints() const {
  std::vector<double> pts;
  std::visit(overloaded{
                 [&](const ZeroForm&) {},
                 [&](const StepPotentialSpec& s) { pts = s.boundaries; },
                 [&](const ExponentialForm&) {},
                 [&](const SampledForm& s) { pts = s.x; },
             },
             form_);
  std::vector<double> inside;
  for (double p : pts)
    if (p > 0.0 && p < x_max_) inside.push_back(p);
  return inside;
}

double Potential::first_moment() const {
  if (is_zero()) return 0.0;
  // Composite 5-point Gauss-Legendre on panels that never straddle a breakpoint.
  static constexpr std::array<double, 5> nodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> weights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                 0.4786286704993665, 0.2369268850561891};
  std::vector<double> edges{0.0};
  for (double b : breakpoints()) edges.push_back(b);
  edges.push_back(x_max_);
  Mat v(n_, n_);
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double lo = edges[s];
    const double hi = edges[s + 1];
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / 0.05)));
    const double w = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = lo + (p + 0.5) * w;
      for (std::size_t q = 0; q < nodes.size(); ++q) {
        const double x = mid + 0.5 * w * nodes[q];
        value(x, v);
        total += 0.5 * w * weights[q] * (1.0 + x) * hermitian_norm(v);
      }
    }
  }
  return total;
}

std::string Potential::name() const {
  return std::visit(overloaded{
                        [](const ZeroForm&) { return std::string("zero"); },
                        [](const StepPotentialSpec&) { return std::string("step"); },
                        [](const ExponentialForm&) { return std::string("exponential"); },
                        [](const SampledForm&) { return std::string("sampled"); },
                    },
                    form_);
}

Potential validate_potential(const SampledForm& raw, double x_max) {
  if (raw.x.empty() || raw.x.size() != raw.values.size())
    throw ScatteringError(ErrorCode::DimensionMismatch, "potential needs one matrix per sample");
  const int n = static_cast<int>(raw.values.front().rows());
  if (n == 0) throw ScatteringError(ErrorCode::DimensionMismatch, "empty potential sample");
  SampledForm form;
  form.x = raw.x;
  form.values.reserve(raw.values.size());
  for (std::size_t i = 0; i < raw.x.size(); ++i) {
    const Mat& v = raw.values[i];
    if (v.rows() != n || v.cols() != n)
      throw ScatteringError(ErrorCode::DimensionMismatch, "potential samples must share one square size");
    if (!std::isfinite(raw.x[i])) throw ScatteringError(ErrorCode::NonFiniteSample, "non-finite x sample");
    if (i == 0 && raw.x[i] < 0.0) throw ScatteringError(ErrorCode::DimensionMismatch, "x samples must be >= 0");
    if (i > 0 && !(raw.x[i] > raw.x[i - 1]))
      throw ScatteringError(ErrorCode::DimensionMismatch, "x samples must be strictly ascending");
    require_hermitian(v, "potential sample");
    form.values.push_back(hermitian_part(v));
  }
  const double top = x_max > 0.0 ? x_max : raw.x.back();
  if (top < raw.x.back())
    throw ScatteringError(ErrorCode::DimensionMismatch, "x_max is below the last sample");
  Potential p(n, top, std::move(form));
  if (!std::isfinite(p.first_moment()))
    throw ScatteringError(ErrorCode::NonFiniteSample, "first moment is not finite");
  return p;
}

Potential zero_potential(int n, double x_max) {
  if (n <= 0) throw ScatteringError(ErrorCode::DimensionMismatch, "matrix size must be positive");
  return Potential(n, x_max, ZeroForm{});
}

Potential step_potential(const StepPotentialSpec& spec, double x_max) {
  if (spec.boundaries.size() != spec.layers.size() || spec.layers.empty())
    throw ScatteringError(ErrorCode::DimensionMismatch, "step potential needs one layer per boundary");
  const int n = static_cast<int>(spec.layers.front().rows());
  double prev = 0.0;
  StepPotentialSpec clean;
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    if (!(spec.boundaries[l] > prev))
      throw ScatteringError(ErrorCode::DimensionMismatch, "layer boundaries must be ascending and positive");
    prev = spec.boundaries[l];
    if (spec.layers[l].rows() != n || spec.layers[l].cols() != n)
      throw ScatteringError(ErrorCode::DimensionMismatch, "layers must share one square size");
    require_hermitian(spec.layers[l], "layer");
    clean.boundaries.push_back(spec.boundaries[l]);
    clean.layers.push_back(hermitian_part(spec.layers[l]));
  }
  return Potential(n, std::max(x_max, prev), std::move(clean));
}

Potential exponential_potential(const Mat& amplitude, double decay, double x_max) {
  if (amplitude.rows() != amplitude.cols() || amplitude.rows() == 0)
    throw ScatteringError(ErrorCode::DimensionMismatch, "amplitude must be square");
  if (!(decay > 0.0)) throw ScatteringError(ErrorCode::NonFiniteSample, "decay rate must be positive");
  require_hermitian(amplitude, "amplitude");
  return Potential(static_cast<int>(amplitude.rows()), x_max, ExponentialForm{hermitian_part(amplitude), decay});
}

}  // namespace halfline
