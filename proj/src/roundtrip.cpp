#include "halfline/roundtrip.hpp"

#include <algorithm>
#include <cmath>

namespace halfline {

double relative_l1_error(const Potential& reference, const Potential& other, double a, double b) {
  constexpr int kCellsPerUnit = 2000;
  const int cells = std::max(1, static_cast<int>(std::ceil((b - a) * kCellsPerUnit)));
  const double dx = (b - a) / cells;
  double diff = 0.0, norm = 0.0;
  Mat v1, v2;
  for (int i = 0; i < cells; ++i) {
    const double x = a + (i + 0.5) * dx;
    reference.value(x, v1);
    other.value(x, v2);
    diff += norm2(v1 - v2) * dx;
    norm += norm2(v1) * dx;
  }
  return norm > 0.0 ? diff / norm : diff;
}

double max_s_error(const ScatteringData& a, const ScatteringData& b, double k_limit) {
  double err = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < a.k_grid.size(); ++i) {
    const double k = a.k_grid[i];
    if (std::abs(k) > k_limit) continue;
    while (j < b.k_grid.size() && b.k_grid[j] < k - 1e-12 * std::max(1.0, std::abs(k))) ++j;
    if (j < b.k_grid.size() && std::abs(b.k_grid[j] - k) <= 1e-12 * std::max(1.0, std::abs(k)))
      err = std::max(err, norm2(a.S[i] - b.S[j]));
  }
  return err;
}

RoundtripResult roundtrip(const Potential& v, const BoundaryCondition& bc, const DirectConfig& dcfg,
                          const InverseConfig& icfg, const RoundtripThresholds& thresholds) {
  RoundtripResult r{solve_direct(v, bc, dcfg), std::nullopt, std::nullopt};
  r.recovered = invert(r.forward.data, icfg);
  const RecoveredInput& rec = *r.recovered;
  r.potential_window = thresholds.potential_window * rec.V.x_max();
  r.potential_error = relative_l1_error(v, rec.V, 0.0, r.potential_window);
  r.boundary_distance = boundary_distance(bc, rec.bc);
  r.boundary_equivalent = r.boundary_distance <= thresholds.boundary;

  DirectConfig second = dcfg;
  second.x_max.reset();
  r.reproduced = solve_direct(rec.V, rec.bc, second);
  r.k_limit = 0.5 * dcfg.k_max;
  r.scattering_error = max_s_error(r.forward.data, r.reproduced->data, r.k_limit);
  r.pass = r.potential_error <= thresholds.potential && r.boundary_equivalent &&
           r.scattering_error <= thresholds.scattering;
  return r;
}

}  // namespace halfline
