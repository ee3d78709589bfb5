#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "halfline/inverse.hpp"
#include "halfline/types.hpp"

namespace halfline {

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);

struct UnitarityResult {
  double symmetry = 0.0;   // max |S(-k) - S(k)^†|
  double unitarity = 0.0;  // max |S(k) S(k)^† - I|
  double residual = 0.0;
  Verdict verdict = Verdict::Pass;
};

UnitarityResult check_unitarity_symmetry(const ScatteringData& s, double tol = 1e-6);

struct FsRegularity {
  double sup = 0.0;
  double moment = 0.0;          // int_0^{y_max} (1+y) |F_s'(y)| dy
  double tail_fraction = 0.0;   // share of the moment from y > y_max/2
  double negative_l1_tail = 0.0;  // diagnostics on y < -y_max/2, never decisive
  double negative_l2_tail = 0.0;
  Verdict verdict = Verdict::Pass;
};

/// fs holds F_s(l h) for l = -L..L.
FsRegularity check_Fs_regularity(std::span<const Mat> fs, double h);

struct JostConsistency {
  double residual = 0.0;  // max_k |J(-k) + S(k) J(k)| / max(1, |J(k)|)
  Verdict verdict = Verdict::Pass;
};

/// With reconstructed set, J comes from the inverse kernel and only agrees
/// with S to discretization accuracy, so residuals between pass_tol and
/// fail_tol are reported as inconclusive instead of failing.
JostConsistency check_jost_consistency(const ScatteringData& s, const JostBundle& j, bool reconstructed = false,
                                       double pass_tol = 1e-6, double fail_tol = 1e-2);

struct UniquenessResult {
  double sigma_min = 1.0;
  Verdict verdict = Verdict::Pass;
};

/// f holds F(l h), l = 0..L.
UniquenessResult check_marchenko_uniqueness(std::span<const Mat> f, double h, QuadRule rule = QuadRule::Gregory);

struct VcResult {
  int count = 0;
  int expected = 0;
  double sigma_at_expected = 0.0;  // expected-th smallest (relative), 0 when expected = 0
  double sigma_next = 0.0;         // (expected+1)-th smallest (relative)
  Verdict verdict = Verdict::Pass;
};

/// fs holds F_s(l h), l = 0..L.
VcResult count_Vc_solutions(std::span<const Mat> fs, double h, int expected, QuadRule rule = QuadRule::Gregory);

struct VbResult {
  double residual = 0.0;
  Verdict verdict = Verdict::Pass;
};

/// j_at_kappa[i] is J(i kappa_i) for bound_states[i].
VbResult check_Vb(std::span<const Mat> j_at_kappa, std::span<const BoundState> bound_states, bool reconstructed = false);

struct LevinsonResult {
  double lhs = 0.0;
  double rhs = 0.0;
  int bound_states = 0;  // sum of multiplicities in the data
  int mu = 0;
  int n_dirichlet = 0;
  int n = 0;
  Verdict verdict = Verdict::Pass;
  std::string detail;
};

/// Phase winding of det S over the positive grid against
/// pi (2N + mu + n_D - n). Throws PhaseUnwrapFailure on large jumps.
LevinsonResult levinson_check(const ScatteringData& s, const Mat& s_inf);

struct CheckEntry {
  std::string name;
  Verdict verdict = Verdict::Pass;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct CharacterizationReport {
  std::vector<CheckEntry> checks;
  int n = 0;
  int bound_states_data = 0;
  double bound_states_levinson = 0.0;
  int mu = 0;
  int n_dirichlet = 0;
  double levinson_lhs = 0.0;
  double levinson_rhs = 0.0;

  bool any_fail() const;
  bool any_inconclusive() const;
};

/// Optional direct-side data sharpening the Jost checks.
struct DirectJost {
  const JostBundle* bundle = nullptr;
  std::vector<Mat> at_kappa;  // J(i kappa_j)
};

CharacterizationReport marchenko_class_report(const ScatteringData& s, const InverseConfig& cfg,
                                              const DirectJost& direct = {});

}  // namespace halfline
