#pragma once

#include <optional>

#include "halfline/direct.hpp"
#include "halfline/inverse.hpp"

namespace halfline {

/// int_a^b |V1 - V2| / int_a^b |V1| with the operator norm, by a fine
/// midpoint rule. Falls back to the absolute error when V1 vanishes there.
double relative_l1_error(const Potential& reference, const Potential& other, double a, double b);

/// max |S1(k) - S2(k)| over common grid nodes with |k| <= k_limit.
double max_s_error(const ScatteringData& a, const ScatteringData& b, double k_limit);

struct RoundtripThresholds {
  double potential = 5e-2;
  double scattering = 1e-3;
  /// Largest projector distance still counted as the same boundary condition.
  double boundary = 1e-2;
  /// Potential error is measured on [0, potential_window * x_max].
  double potential_window = 0.8;
};

struct RoundtripResult {
  DirectResult forward;
  std::optional<RecoveredInput> recovered;
  std::optional<DirectResult> reproduced;
  double potential_error = 0.0;
  double potential_window = 0.0;
  double boundary_distance = 0.0;
  bool boundary_equivalent = false;
  double scattering_error = 0.0;
  double k_limit = 0.0;
  bool pass = false;
};

/// D -> S -> D' -> S'. Errors from the inverse or second direct pass
/// propagate as exceptions.
RoundtripResult roundtrip(const Potential& v, const BoundaryCondition& bc, const DirectConfig& dcfg,
                          const InverseConfig& icfg, const RoundtripThresholds& thresholds = {});

}  // namespace halfline
