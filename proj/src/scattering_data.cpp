#include "halfline/types.hpp"

#include <algorithm>
#include <cmath>

namespace halfline {

BoundState validate_bound_state(double kappa, const Mat& m) {
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw ScatteringError(ErrorCode::BadBoundState, "bound-state kappa must be positive");
  if (m.rows() != m.cols() || m.rows() == 0)
    throw ScatteringError(ErrorCode::BadBoundState, "normalization matrix must be square");
  if (!all_finite(m)) throw ScatteringError(ErrorCode::BadBoundState, "normalization matrix is not finite");
  if (max_abs(m - m.adjoint()) > 1e-10 * std::max(1.0, max_abs(m)))
    throw ScatteringError(ErrorCode::BadBoundState, "normalization matrix is not hermitian");
  const Mat h = hermitian_part(m);
  const HermitianEigen he = hermitian_eigen(h);
  if (he.values(0) < -1e-12)
    throw ScatteringError(ErrorCode::BadBoundState, "normalization matrix is not nonnegative");
  const int rank = numerical_rank(h);
  if (rank < 1) throw ScatteringError(ErrorCode::BadBoundState, "normalization matrix has rank zero");
  return BoundState{kappa, h, rank};
}

int ScatteringData::bound_state_count() const {
  int total = 0;
  for (const auto& b : bound_states) total += b.multiplicity;
  return total;
}

ScatteringData validate_scattering_data(ScatteringData raw) {
  if (raw.k_grid.empty() || raw.k_grid.size() != raw.S.size())
    throw ScatteringError(ErrorCode::DimensionMismatch, "scattering matrix needs one sample per k node");
  if (raw.n <= 0) raw.n = static_cast<int>(raw.S.front().rows());
  for (const Mat& s : raw.S) {
    if (s.rows() != raw.n || s.cols() != raw.n)
      throw ScatteringError(ErrorCode::DimensionMismatch, "scattering samples must be n x n");
    if (!all_finite(s)) throw ScatteringError(ErrorCode::NonFinite, "scattering sample is not finite");
  }
  const auto& k = raw.k_grid;
  for (std::size_t i = 1; i < k.size(); ++i)
    if (!(k[i] > k[i - 1])) throw ScatteringError(ErrorCode::AsymmetricGrid, "k grid must be strictly ascending");
  const double kmax = std::max(std::abs(k.front()), std::abs(k.back()));
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (std::abs(k[i] + k[k.size() - 1 - i]) > 1e-12 * std::max(1.0, kmax))
      throw ScatteringError(ErrorCode::AsymmetricGrid, "k grid is not symmetric about zero");
  }

  std::vector<BoundState> states;
  for (const auto& b : raw.bound_states) {
    if (b.M.rows() != raw.n)
      throw ScatteringError(ErrorCode::BadBoundState, "normalization matrix has the wrong size");
    states.push_back(validate_bound_state(b.kappa, b.M));
  }
  std::sort(states.begin(), states.end(), [](const BoundState& a, const BoundState& b) { return a.kappa < b.kappa; });
  for (std::size_t j = 1; j < states.size(); ++j)
    if (states[j].kappa - states[j - 1].kappa <= 1e-12 * states[j].kappa)
      throw ScatteringError(ErrorCode::BadBoundState, "duplicate bound-state kappa");
  raw.bound_states = std::move(states);
  return raw;
}

std::vector<double> symmetric_k_grid(double k_max, int count) {
  if (count < 2 || !(k_max > 0.0))
    throw ScatteringError(ErrorCode::DimensionMismatch, "k grid needs k_max > 0 and at least two points");
  std::vector<double> k(static_cast<std::size_t>(count));
  const double step = 2.0 * k_max / (count - 1);
  for (int i = 0; i < count; ++i) k[static_cast<std::size_t>(i)] = (i - 0.5 * (count - 1)) * step;
  // exact antisymmetry
  for (int i = 0; i < count / 2; ++i) k[static_cast<std::size_t>(count - 1 - i)] = -k[static_cast<std::size_t>(i)];
  if (count % 2 == 1) k[static_cast<std::size_t>(count / 2)] = 0.0;
  return k;
}

double jost_bundle_defect(const JostBundle& bundle, const BoundaryCondition& bc) {
  double worst = 0.0;
  const std::size_t n = bundle.k_grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t m = n - 1 - i;
    const Mat expected = bundle.f0[m].adjoint() * bc.B() - bundle.fp0[m].adjoint() * bc.A();
    worst = std::max(worst, max_abs(bundle.J[i] - expected));
  }
  return worst;
}

}  // namespace halfline
