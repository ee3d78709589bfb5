#include "halfline/characterize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace halfline {

namespace {

constexpr double kVcZero = 1e-4;
constexpr double kVcGap = 1e-2;
constexpr double kUniquenessTol = 1e-6;
constexpr double kEigenSnap = 1e-3;
constexpr double kMaxPhaseJump = kPi / 4.0;
// Below this the moment is rounding noise and its tail share means nothing.
constexpr double kNegligibleMoment = 1e-10;

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a <= -kPi ? a + 2.0 * kPi : a;
}

Verdict three_valued(double residual, double pass_tol, double fail_tol) {
  if (!std::isfinite(residual) || residual > fail_tol) return Verdict::Fail;
  return residual <= pass_tol ? Verdict::Pass : Verdict::Inconclusive;
}

/// Ascending absolute eigenvalues of a hermitian matrix, divided by the
/// largest one.
Eigen::VectorXd relative_singular_values(const Mat& hermitian) {
  Eigen::VectorXd s = hermitian_eigen(hermitian).values.cwiseAbs();
  std::sort(s.data(), s.data() + s.size());
  const double top = s.size() ? s(s.size() - 1) : 1.0;
  if (top > 0.0) s /= top;
  return s;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

UnitarityResult check_unitarity_symmetry(const ScatteringData& s, double tol) {
  UnitarityResult r;
  const Mat id = identity(s.n);
  for (std::size_t i = 0; i < s.k_grid.size(); ++i) {
    const Mat& sk = s.S[i];
    r.symmetry = std::max(r.symmetry, norm2(s.S[s.mirror(i)] - sk.adjoint()));
    r.unitarity = std::max(r.unitarity, norm2(sk * sk.adjoint() - id));
  }
  r.residual = std::max(r.symmetry, r.unitarity);
  r.verdict = std::isfinite(r.residual) && r.residual <= tol ? Verdict::Pass : Verdict::Fail;
  return r;
}

FsRegularity check_Fs_regularity(std::span<const Mat> fs, double h) {
  FsRegularity r;
  const int half = (static_cast<int>(fs.size()) - 1) / 2;
  bool finite = true;
  for (const Mat& v : fs) {
    finite = finite && all_finite(v);
    r.sup = std::max(r.sup, norm2(v));
  }
  if (!finite) {
    r.verdict = Verdict::Fail;
    return r;
  }
  // F_s may jump at y = 0, so each half line is differentiated separately.
  const std::span<const Mat> pos = fs.subspan(static_cast<std::size_t>(half));
  const std::vector<Mat> dpos = uniform_derivative(pos, h);
  const std::vector<double> w = uniform_weights(static_cast<int>(pos.size()), h, QuadRule::Gregory);
  const int tail_start = half / 2;
  const std::vector<double> wt = uniform_weights(half - tail_start + 1, h, QuadRule::Gregory);
  double tail = 0.0;
  for (int l = 0; l <= half; ++l) {
    const double y = l * h;
    const double g = (1.0 + y) * norm2(dpos[static_cast<std::size_t>(l)]);
    r.moment += w[static_cast<std::size_t>(l)] * g;
    if (l >= tail_start) tail += wt[static_cast<std::size_t>(l - tail_start)] * g;
  }
  r.tail_fraction = r.moment > 0.0 ? tail / r.moment : 0.0;

  const std::span<const Mat> neg = fs.subspan(0, static_cast<std::size_t>(half));
  if (neg.size() >= 2) {
    const std::vector<Mat> dneg = uniform_derivative(neg, h);
    double l2 = 0.0;
    for (int l = 0; l <= half / 2 && l < static_cast<int>(dneg.size()); ++l) {
      const double v = norm2(dneg[static_cast<std::size_t>(l)]);
      r.negative_l1_tail += v * h;
      l2 += v * v * h;
    }
    r.negative_l2_tail = std::sqrt(l2);
  }

  if (!std::isfinite(r.moment)) r.verdict = Verdict::Fail;
  else if (r.moment <= kNegligibleMoment) r.verdict = Verdict::Pass;
  else r.verdict = r.tail_fraction < 0.01 ? Verdict::Pass : Verdict::Inconclusive;
  return r;
}

JostConsistency check_jost_consistency(const ScatteringData& s, const JostBundle& j, bool reconstructed,
                                       double pass_tol, double fail_tol) {
  if (j.J.size() != s.S.size()) throw ScatteringError(ErrorCode::DimensionMismatch, "Jost bundle and S grids differ");
  JostConsistency r;
  for (std::size_t i = 0; i < s.S.size(); ++i) {
    const Mat& jk = j.J[i];
    const double scale = std::max(1.0, norm2(jk));
    r.residual = std::max(r.residual, norm2(j.J[s.mirror(i)] + s.S[i] * jk) / scale);
  }
  if (reconstructed) r.verdict = three_valued(r.residual, pass_tol, fail_tol);
  else r.verdict = std::isfinite(r.residual) && r.residual <= pass_tol ? Verdict::Pass : Verdict::Fail;
  return r;
}

UniquenessResult check_marchenko_uniqueness(std::span<const Mat> f, double h, QuadRule rule) {
  UniquenessResult r;
  const Mat a = marchenko_symmetric_operator(f, h, 0, rule);
  r.sigma_min = hermitian_eigen(a).values.cwiseAbs().minCoeff();
  r.verdict = r.sigma_min > kUniquenessTol ? Verdict::Pass : Verdict::Fail;
  return r;
}

VcResult count_Vc_solutions(std::span<const Mat> fs, double h, int expected, QuadRule rule) {
  VcResult r;
  r.expected = expected;
  const Eigen::VectorXd s = relative_singular_values(marchenko_symmetric_operator(fs, h, 0, rule));
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) < kVcZero) ++r.count;
  r.sigma_at_expected = expected > 0 && expected <= s.size() ? s(expected - 1) : 0.0;
  r.sigma_next = expected < s.size() ? s(expected) : std::numeric_limits<double>::infinity();
  const bool low_ok = expected == 0 || r.sigma_at_expected < kVcZero;
  const bool gap_ok = r.sigma_next > kVcGap;
  if (low_ok && gap_ok) r.verdict = Verdict::Pass;
  else if (r.sigma_next < kVcZero || (expected > 0 && r.sigma_at_expected > kVcGap)) r.verdict = Verdict::Fail;
  else r.verdict = Verdict::Inconclusive;
  return r;
}

VbResult check_Vb(std::span<const Mat> j_at_kappa, std::span<const BoundState> bound_states, bool reconstructed) {
  if (j_at_kappa.size() != bound_states.size())
    throw ScatteringError(ErrorCode::DimensionMismatch, "one J(i kappa) per bound state expected");
  VbResult r;
  for (std::size_t i = 0; i < bound_states.size(); ++i)
    r.residual = std::max(r.residual, norm2(j_at_kappa[i].adjoint() * bound_states[i].M));
  if (reconstructed) r.verdict = three_valued(r.residual, 1e-6, 1e-2);
  else r.verdict = std::isfinite(r.residual) && r.residual <= 1e-6 ? Verdict::Pass : Verdict::Fail;
  return r;
}

LevinsonResult levinson_check(const ScatteringData& s, const Mat& s_inf) {
  LevinsonResult r;
  r.n = s.n;
  r.bound_states = s.bound_state_count();
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < s.k_grid.size(); ++i)
    if (s.k_grid[i] > 0.0) pos.push_back(i);
  if (pos.size() < 2) {
    r.verdict = Verdict::Inconclusive;
    r.detail = "fewer than two positive grid nodes";
    return r;
  }

  const double first = std::arg(s.S[pos[0]].determinant());
  double phase = first;
  double prev = first;
  double second = first;
  for (std::size_t t = 1; t < pos.size(); ++t) {
    const double cur = std::arg(s.S[pos[t]].determinant());
    const double jump = wrap_angle(cur - prev);
    if (std::abs(jump) > kMaxPhaseJump) {
      std::ostringstream msg;
      msg << "arg det S jumps by " << jump << " between k = " << s.k_grid[pos[t - 1]] << " and " << s.k_grid[pos[t]];
      throw ScatteringError(ErrorCode::PhaseUnwrapFailure, msg.str());
    }
    phase += jump;
    prev = cur;
    if (t == 1) second = phase;
  }
  // arg det S is odd in k modulo 2 pi, so a straight line through the first
  // two nodes reaches k = 0+ with an O(k^3) error.
  const double k0 = s.k_grid[pos[0]], k1 = s.k_grid[pos[1]];
  const double start = first - k0 * (second - first) / (k1 - k0);
  const double target = std::arg(s_inf.determinant());
  const double end = target + 2.0 * kPi * std::round((phase - target) / (2.0 * kPi));
  r.lhs = start - end;

  std::ostringstream detail;
  const HermitianEigen inf_eig = hermitian_eigen(s_inf);
  bool snapped = true;
  for (Eigen::Index i = 0; i < inf_eig.values.size(); ++i) {
    const double v = inf_eig.values(i);
    if (std::abs(std::abs(v) - 1.0) > kEigenSnap) snapped = false;
    if (v < 0.0) ++r.n_dirichlet;
  }

  // S(k) near 0: the hermitian part is even in k, so a two-node Richardson
  // step removes the k^2 term.
  const Mat h0 = hermitian_part(s.S[pos[0]]), h1 = hermitian_part(s.S[pos[1]]);
  const Mat h_zero = (k1 * k1 * h0 - k0 * k0 * h1) / (k1 * k1 - k0 * k0);
  const HermitianEigen zero_eig = hermitian_eigen(h_zero);
  for (Eigen::Index i = 0; i < zero_eig.values.size(); ++i) {
    const double v = zero_eig.values(i);
    if (std::abs(std::abs(v) - 1.0) > kEigenSnap) snapped = false;
    if (v > 0.0) ++r.mu;
  }

  r.rhs = kPi * (2.0 * r.bound_states + r.mu + r.n_dirichlet - r.n);
  if (!snapped) {
    r.verdict = Verdict::Inconclusive;
    detail << "eigenvalues of S(0+) or S_inf are not within " << kEigenSnap << " of +-1";
  } else {
    r.verdict = std::abs(r.lhs - r.rhs) <= 0.05 * kPi ? Verdict::Pass : Verdict::Fail;
  }
  r.detail = detail.str();
  return r;
}

bool CharacterizationReport::any_fail() const {
  return std::any_of(checks.begin(), checks.end(), [](const CheckEntry& c) { return c.verdict == Verdict::Fail; });
}

bool CharacterizationReport::any_inconclusive() const {
  return std::any_of(checks.begin(), checks.end(),
                     [](const CheckEntry& c) { return c.verdict == Verdict::Inconclusive; });
}

CharacterizationReport marchenko_class_report(const ScatteringData& raw, const InverseConfig& cfg,
                                              const DirectJost& direct) {
  check_config(cfg);
  const ScatteringData s = validate_scattering_data(raw);
  CharacterizationReport rep;
  rep.n = s.n;
  rep.bound_states_data = s.bound_state_count();
  auto add = [&](std::string name, Verdict v, double value, double threshold, std::string detail = {}) {
    rep.checks.push_back({std::move(name), v, value, threshold, std::move(detail)});
  };
  auto skip = [&](std::initializer_list<const char*> names, const std::string& why) {
    for (const char* name : names) add(name, Verdict::Inconclusive, std::nan(""), 0.0, why);
  };

  const UnitarityResult unit = check_unitarity_symmetry(s);
  add("unitarity_symmetry", unit.verdict, unit.residual, 1e-6);

  TailFit tail;
  try {
    tail = tail_fit(s, cfg);
  } catch (const ScatteringError& e) {
    add("tail_fit", Verdict::Fail, std::nan(""), 1e-3, e.what());
    skip({"fs_regularity", "marchenko_uniqueness", "vc_count", "jost_consistency", "vb_orthogonality", "levinson"},
         "tail fit failed");
    return rep;
  }
  add("tail_fit", Verdict::Pass, tail.residual, 1e-3);

  const int half = kernel_half_count(cfg);
  const double h = cfg.h;
  std::vector<double> y(static_cast<std::size_t>(2 * half + 1));
  for (int l = -half; l <= half; ++l) y[static_cast<std::size_t>(l + half)] = l * h;
  const std::vector<Mat> fs = fourier_Fs(s, tail, y);
  const std::span<const double> y_pos(y.data() + half, static_cast<std::size_t>(half) + 1);
  const std::span<const Mat> fs_pos(fs.data() + half, static_cast<std::size_t>(half) + 1);
  const std::vector<Mat> f = assemble_F(y_pos, fs_pos, s.bound_states);

  // The hard cutoff at k_max leaves ringing ~ 1/(k_max y) in F_s', which
  // the (1+y) weight turns into a spurious tail; the tapered transform does not.
  const FsRegularity reg = check_Fs_regularity(fourier_Fs(s, tail, y, false, true), h);
  {
    std::ostringstream d;
    d << "sup " << reg.sup << ", tail fraction " << reg.tail_fraction << ", negative-side L1/L2 tail "
      << reg.negative_l1_tail << "/" << reg.negative_l2_tail;
    add("fs_regularity", reg.verdict, reg.moment, 0.01, d.str());
  }

  const UniquenessResult uniq = check_marchenko_uniqueness(f, h, cfg.quad);
  add("marchenko_uniqueness", uniq.verdict, uniq.sigma_min, 1e-6);

  const VcResult vc = count_Vc_solutions(fs_pos, h, rep.bound_states_data, cfg.quad);
  {
    std::ostringstream d;
    d << "count " << vc.count << ", expected " << vc.expected << ", sigma_N " << vc.sigma_at_expected
      << ", sigma_N+1 " << vc.sigma_next;
    add("vc_count", vc.verdict, vc.count, vc.expected, d.str());
  }

  std::optional<RecoveredInput> rec;
  std::string rec_error;
  const bool need_rec = direct.bundle == nullptr || direct.at_kappa.size() != s.bound_states.size();
  if (need_rec) {
    try {
      rec = invert(s, cfg);
    } catch (const ScatteringError& e) {
      rec_error = e.what();
    }
  }

  if (direct.bundle) {
    const JostConsistency jc = check_jost_consistency(s, *direct.bundle, false);
    add("jost_consistency", jc.verdict, jc.residual, 1e-6, "direct Jost matrix");
  } else if (rec) {
    const JostBundle jb = reconstructed_jost_bundle(*rec, s.k_grid, cfg.quad);
    const JostConsistency jc = check_jost_consistency(s, jb, true);
    add("jost_consistency", jc.verdict, jc.residual, 1e-6, "Jost matrix rebuilt from the Marchenko kernel");
  } else {
    skip({"jost_consistency"}, "reconstruction failed: " + rec_error);
  }

  if (direct.at_kappa.size() == s.bound_states.size() && (direct.bundle || s.bound_states.empty())) {
    const VbResult vb = check_Vb(direct.at_kappa, s.bound_states, false);
    add("vb_orthogonality", vb.verdict, vb.residual, 1e-6, "direct Jost matrix");
  } else if (rec) {
    std::vector<Mat> jk;
    for (const BoundState& b : s.bound_states) jk.push_back(reconstructed_jost_matrix(*rec, cplx(0.0, b.kappa), cfg.quad));
    const VbResult vb = check_Vb(jk, s.bound_states, true);
    add("vb_orthogonality", vb.verdict, vb.residual, 1e-6, "Jost matrix rebuilt from the Marchenko kernel");
  } else {
    skip({"vb_orthogonality"}, "reconstruction failed: " + rec_error);
  }

  try {
    const LevinsonResult lev = levinson_check(s, tail.S_inf);
    rep.mu = lev.mu;
    rep.n_dirichlet = lev.n_dirichlet;
    rep.levinson_lhs = lev.lhs;
    rep.levinson_rhs = lev.rhs;
    rep.bound_states_levinson = 0.5 * (lev.lhs / kPi - lev.mu - lev.n_dirichlet + lev.n);
    std::ostringstream d;
    d << "lhs " << lev.lhs << ", rhs " << lev.rhs << ", mu " << lev.mu << ", n_D " << lev.n_dirichlet;
    if (!lev.detail.empty()) d << "; " << lev.detail;
    add("levinson", lev.verdict, std::abs(lev.lhs - lev.rhs), 0.05 * kPi, d.str());
  } catch (const ScatteringError& e) {
    add("levinson", Verdict::Inconclusive, std::nan(""), 0.05 * kPi, e.what());
  }
  return rep;
}

}  // namespace halfline
