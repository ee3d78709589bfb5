#include "halfline/direct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "halfline/ode.hpp"
#include "halfline/parallel.hpp"

namespace halfline {

namespace {

constexpr double kSingularJostCond = 1e12;
constexpr double kClusterGap = 1e-8;

double start_radius(const Potential& v, const DirectConfig& cfg) { return cfg.x_max.value_or(v.x_max()); }

Dop853::Options ode_options(const DirectConfig& cfg) {
  Dop853::Options o;
  o.rtol = cfg.ode_tol;
  o.atol = cfg.ode_tol;
  return o;
}

/// Interior breakpoints of v strictly inside (lo, hi) plus the given extra
/// points, sorted and deduplicated.
std::vector<double> segment_edges(const Potential& v, double lo, double hi, std::span<const double> extra) {
  std::vector<double> edges{lo, hi};
  for (double b : v.breakpoints())
    if (b > lo && b < hi) edges.push_back(b);
  for (double e : extra)
    if (e > lo && e < hi) edges.push_back(e);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(), [](double a, double b) { return std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(a)); }),
              edges.end());
  return edges;
}

/// Keeps potential lookups inside the open segment so that layer values are
/// taken from the correct side of a jump.
struct SegmentClamp {
  double lo = 0.0;
  double hi = 0.0;
  double operator()(double x) const {
    const double pad = 1e-12 * (hi - lo);
    return std::clamp(x, lo + pad, hi - pad);
  }
};

double brent_root(const std::function<double(double)>& fn, double a, double b, double fa, double fb, double xtol) {
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if ((fb > 0 && fc > 0) || (fb < 0 && fc < 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0 ? tol : -tol);
    fb = fn(b);
  }
  return b;
}

double golden_min(const std::function<double(double)>& fn, double a, double b, double xtol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > xtol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = fn(d);
    }
  }
  return fc <= fd ? c : d;
}

struct Probe {
  Mat J;
  double scale = 1.0;
  double sigma_rel = 0.0;
  cplx det_rel;
};

Probe probe(const Potential& v, const BoundaryCondition& bc, double kappa, const DirectConfig& cfg) {
  const JostValues jv = jost_solution(v, cplx(0.0, kappa), cfg);
  Probe p;
  p.J = jost_matrix(jv.f0, jv.fp0, bc);
  Mat fstack(2 * v.n(), v.n());
  fstack << jv.f0, jv.fp0;
  p.scale = norm2(fstack) * norm2(bc.stacked());
  const Eigen::VectorXd sv = singular_values(p.J);
  p.sigma_rel = sv(sv.size() - 1) / p.scale;
  p.det_rel = p.J.determinant() / std::pow(p.scale, v.n());
  return p;
}

}  // namespace

void check_config(const DirectConfig& cfg) {
  auto bad = [](const std::string& what) { throw ScatteringError(ErrorCode::DimensionMismatch, "direct config: " + what); };
  if (cfg.x_max && !(*cfg.x_max > 0.0)) bad("x_max must be positive");
  if (!(cfg.ode_tol > 0.0 && cfg.ode_tol < 1e-2)) bad("ode_tol out of range");
  if (!(cfg.k_max > 0.0)) bad("k_max must be positive");
  if (cfg.k_count < 4) bad("k_count must be at least 4");
  if (!(cfg.kappa_min > 0.0 && cfg.kappa_max > cfg.kappa_min)) bad("kappa range invalid");
  if (!(cfg.kappa_step > 0.0)) bad("kappa_step must be positive");
  if (!(cfg.det_tol > 0.0)) bad("det_tol must be positive");
}

JostValues jost_solution(const Potential& v, cplx k, const DirectConfig& cfg, std::span<const double> profile_x,
                         bool with_gram) {
  if (k.imag() < 0.0) throw ScatteringError(ErrorCode::DimensionMismatch, "Jost solution needs Im k >= 0");
  const int n = v.n();
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  const double xm = start_radius(v, cfg);
  const bool gram = with_gram && k.imag() > 0.0;
  const double two_kappa = 2.0 * k.imag();

  SegmentClamp clamp;
  Mat vx(n, n);
  Mat tmp(n, n);
  auto rhs = [&](double x, const Vec& y, Vec& dy) {
    Eigen::Map<const Mat> g(y.data(), n, n);
    Eigen::Map<const Mat> gp(y.data() + nn, n, n);
    Eigen::Map<Mat> dg(dy.data(), n, n);
    Eigen::Map<Mat> dgp(dy.data() + nn, n, n);
    v.value(clamp(x), vx);
    dg = gp;
    tmp.noalias() = vx * g;
    dgp = -2.0 * kI * k * gp + tmp;
    if (gram) {
      Eigen::Map<Mat> dq(dy.data() + 2 * nn, n, n);
      dq.noalias() = g.adjoint() * g;
      dq *= -std::exp(-two_kappa * x);
    }
  };
  Dop853 ode(rhs, ode_options(cfg));

  Vec y = Vec::Zero((gram ? 3 : 2) * nn);
  Eigen::Map<Mat>(y.data(), n, n) = identity(n);
  if (gram) Eigen::Map<Mat>(y.data() + 2 * nn, n, n) = identity(n) * (std::exp(-two_kappa * xm) / two_kappa);

  JostValues out;
  out.k = k;
  std::vector<double> requested(profile_x.begin(), profile_x.end());
  std::sort(requested.begin(), requested.end());
  out.x = requested;
  out.f.resize(requested.size());
  out.fp.resize(requested.size());

  auto record = [&](double x, std::size_t idx) {
    Eigen::Map<const Mat> g(y.data(), n, n);
    Eigen::Map<const Mat> gp(y.data() + nn, n, n);
    const cplx phase = std::exp(kI * k * x);
    out.f[idx] = phase * g;
    out.fp[idx] = phase * (gp + kI * k * g);
  };
  // Points at or beyond the truncation radius follow the free asymptotics.
  auto pending = static_cast<std::ptrdiff_t>(requested.size()) - 1;
  for (; pending >= 0 && requested[static_cast<std::size_t>(pending)] >= xm; --pending)
    record(requested[static_cast<std::size_t>(pending)], static_cast<std::size_t>(pending));

  const std::vector<double> edges = segment_edges(v, 0.0, xm, requested);
  for (std::size_t s = edges.size() - 1; s > 0; --s) {
    clamp = {edges[s - 1], edges[s]};
    ode.integrate(y, edges[s], edges[s - 1]);
    while (pending >= 0 && requested[static_cast<std::size_t>(pending)] >= edges[s - 1] - 1e-14) {
      record(requested[static_cast<std::size_t>(pending)], static_cast<std::size_t>(pending));
      --pending;
    }
  }
  Eigen::Map<const Mat> g0(y.data(), n, n);
  Eigen::Map<const Mat> gp0(y.data() + nn, n, n);
  out.f0 = g0;
  out.fp0 = gp0 + kI * k * g0;
  if (gram) out.gram = hermitian_part(Eigen::Map<const Mat>(y.data() + 2 * nn, n, n));
  if (!all_finite(out.f0) || !all_finite(out.fp0))
    throw ScatteringError(ErrorCode::NonFinite, "Jost solution is not finite");
  return out;
}

Mat jost_matrix(const Mat& f_at_minus_kconj, const Mat& fp_at_minus_kconj, const BoundaryCondition& bc) {
  return f_at_minus_kconj.adjoint() * bc.B() - fp_at_minus_kconj.adjoint() * bc.A();
}

Mat jost_matrix_at(const Potential& v, const BoundaryCondition& bc, cplx k, const DirectConfig& cfg) {
  const cplx mk = -std::conj(k);
  const JostValues jv = jost_solution(v, mk, cfg);
  return jost_matrix(jv.f0, jv.fp0, bc);
}

ScatteringMatrixResult scattering_matrix(const Potential& v, const BoundaryCondition& bc, const DirectConfig& cfg) {
  check_config(cfg);
  if (v.n() != bc.n()) throw ScatteringError(ErrorCode::DimensionMismatch, "potential and boundary sizes differ");
  const int n = v.n();
  ScatteringMatrixResult res;
  res.data.n = n;
  res.data.k_grid = symmetric_k_grid(cfg.k_max, cfg.k_count);
  const std::size_t count = res.data.k_grid.size();
  JostBundle& jb = res.jost;
  jb.k_grid = res.data.k_grid;
  jb.f0.resize(count);
  jb.fp0.resize(count);
  jb.J.resize(count);
  parallel_for(count, cfg.threads, [&](std::size_t i) {
    const JostValues jv = jost_solution(v, cplx(jb.k_grid[i], 0.0), cfg);
    jb.f0[i] = jv.f0;
    jb.fp0[i] = jv.fp0;
  });
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t m = res.data.mirror(i);
    jb.J[i] = jost_matrix(jb.f0[m], jb.fp0[m], bc);
  }
  res.data.S.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double cond = condition_number(jb.J[i]);
    if (!(cond <= kSingularJostCond)) {
      std::ostringstream msg;
      msg << "J(k) singular at k = " << jb.k_grid[i] << " (condition " << cond << ")";
      throw ScatteringError(ErrorCode::SingularJost, msg.str());
    }
    res.data.S[i] = -jb.J[res.data.mirror(i)] * jb.J[i].inverse();
  }
  (void)n;
  return res;
}

RegularSolution regular_solution(const Potential& v, const BoundaryCondition& bc, cplx k,
                                 std::span<const double> x_grid, const DirectConfig& cfg) {
  const int n = v.n();
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  std::vector<double> requested(x_grid.begin(), x_grid.end());
  std::sort(requested.begin(), requested.end());
  RegularSolution out;
  out.x = requested;
  out.phi.resize(requested.size());
  out.dphi.resize(requested.size());
  if (requested.empty()) return out;
  if (requested.front() < 0.0) throw ScatteringError(ErrorCode::DimensionMismatch, "regular solution needs x >= 0");

  SegmentClamp clamp;
  Mat vx(n, n);
  const cplx k2 = k * k;
  auto rhs = [&](double x, const Vec& y, Vec& dy) {
    Eigen::Map<const Mat> phi(y.data(), n, n);
    Eigen::Map<const Mat> dphi(y.data() + nn, n, n);
    Eigen::Map<Mat> d1(dy.data(), n, n);
    Eigen::Map<Mat> d2(dy.data() + nn, n, n);
    v.value(clamp(x), vx);
    d1 = dphi;
    d2.noalias() = vx * phi;
    d2 -= k2 * phi;
  };
  Dop853 ode(rhs, ode_options(cfg));
  Vec y(2 * nn);
  Eigen::Map<Mat>(y.data(), n, n) = bc.A();
  Eigen::Map<Mat>(y.data() + nn, n, n) = bc.B();

  // The potential vanishes past x_max but x_grid may extend further; the
  // segment list then simply continues with V = 0.
  const double hi = std::max(requested.back(), 0.0);
  std::vector<double> edges = segment_edges(v, 0.0, std::max(hi, 1e-300), requested);
  if (hi > v.x_max() && v.x_max() > 0.0) {
    edges.push_back(v.x_max());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }
  std::size_t next = 0;
  auto flush = [&](double x) {
    while (next < requested.size() && requested[next] <= x + 1e-14) {
      out.phi[next] = Eigen::Map<const Mat>(y.data(), n, n);
      out.dphi[next] = Eigen::Map<const Mat>(y.data() + nn, n, n);
      ++next;
    }
  };
  flush(0.0);
  for (std::size_t s = 1; s < edges.size(); ++s) {
    clamp = {edges[s - 1], edges[s]};
    ode.integrate(y, edges[s - 1], edges[s]);
    flush(edges[s]);
  }
  return out;
}

Mat physical_solution(const Mat& f_minus, const Mat& f_plus, const Mat& s) { return f_minus + f_plus * s; }

std::vector<LocatedState> locate_bound_states(const Potential& v, const BoundaryCondition& bc,
                                              const DirectConfig& cfg) {
  check_config(cfg);
  if (v.n() != bc.n()) throw ScatteringError(ErrorCode::DimensionMismatch, "potential and boundary sizes differ");
  std::vector<double> kappas;
  for (long i = 0;; ++i) {
    const double kap = cfg.kappa_min + static_cast<double>(i) * cfg.kappa_step;
    if (kap > cfg.kappa_max + 1e-12 * cfg.kappa_step) break;
    kappas.push_back(std::min(kap, cfg.kappa_max));
  }
  if (kappas.back() < cfg.kappa_max - 1e-9 * cfg.kappa_step) kappas.push_back(cfg.kappa_max);
  const std::size_t count = kappas.size();
  std::vector<Probe> scan(count);
  parallel_for(count, cfg.threads, [&](std::size_t i) { scan[i] = probe(v, bc, kappas[i], cfg); });

  // Real-valued determinant after removing the dominant phase. For scalar and
  // real-symmetric problems det J(i kappa) is real up to this phase, so zeros
  // show up as sign changes.
  std::size_t ref = 0;
  for (std::size_t i = 1; i < count; ++i)
    if (std::abs(scan[i].det_rel) > std::abs(scan[ref].det_rel)) ref = i;
  const cplx rot = std::abs(scan[ref].det_rel) > 0.0 ? std::conj(scan[ref].det_rel) / std::abs(scan[ref].det_rel) : 1.0;
  auto rotated = [&](const Probe& p) { return (p.det_rel * rot).real(); };

  auto rotated_at = [&](double kap) { return rotated(probe(v, bc, kap, cfg)); };
  auto sigma_at = [&](double kap) { return probe(v, bc, kap, cfg).sigma_rel; };
  const double xtol = 1e-12;

  std::vector<double> candidates;
  std::vector<char> bracketed(count, 0);
  for (std::size_t i = 0; i + 1 < count; ++i) {
    const double r0 = rotated(scan[i]), r1 = rotated(scan[i + 1]);
    if (r0 == 0.0) {
      candidates.push_back(kappas[i]);
      bracketed[i] = 1;
    } else if ((r0 < 0.0) != (r1 < 0.0) && r1 != 0.0) {
      candidates.push_back(brent_root(rotated_at, kappas[i], kappas[i + 1], r0, r1, xtol));
      bracketed[i] = bracketed[i + 1] = 1;
    }
  }
  if (rotated(scan[count - 1]) == 0.0) candidates.push_back(kappas[count - 1]);
  for (std::size_t i = 1; i + 1 < count; ++i) {
    if (bracketed[i - 1] || bracketed[i] || bracketed[i + 1]) continue;
    if (scan[i].sigma_rel < scan[i - 1].sigma_rel && scan[i].sigma_rel <= scan[i + 1].sigma_rel)
      candidates.push_back(golden_min(sigma_at, kappas[i - 1], kappas[i + 1], xtol));
  }

  std::vector<LocatedState> found;
  for (double kap : candidates) {
    const Probe p = probe(v, bc, kap, cfg);
    if (!(p.sigma_rel <= cfg.det_tol)) continue;
    if (cfg.kappa_max - kap < cfg.kappa_step) {
      std::ostringstream msg;
      msg << "J(i kappa) vanishes near the scan ceiling (kappa = " << kap << "); raise kappa_max";
      throw ScatteringError(ErrorCode::ScanInconclusive, msg.str());
    }
    const double abs_tol = cfg.det_tol * p.scale;
    LocatedState st;
    st.kappa = kap;
    st.P = kernel_projector(p.J.adjoint(), abs_tol);
    st.multiplicity = static_cast<int>(std::lround(st.P.trace().real()));
    if (st.multiplicity == 0) continue;
    found.push_back(std::move(st));
  }
  if (scan.back().sigma_rel <= cfg.det_tol)
    throw ScatteringError(ErrorCode::ScanInconclusive, "J(i kappa) is singular at the scan ceiling");
  std::sort(found.begin(), found.end(), [](const LocatedState& a, const LocatedState& b) { return a.kappa < b.kappa; });
  for (std::size_t i = 1; i < found.size(); ++i) {
    if (found[i].kappa - found[i - 1].kappa < kClusterGap) {
      std::ostringstream msg;
      msg << "bound states at kappa = " << found[i - 1].kappa << " and " << found[i].kappa << " are not separated";
      throw ScatteringError(ErrorCode::ClusterUnresolved, msg.str());
    }
  }
  return found;
}

std::vector<BoundState> normalization_matrices(const Potential& v, std::span<const LocatedState> states,
                                               const DirectConfig& cfg) {
  const int n = v.n();
  std::vector<BoundState> out(states.size());
  parallel_for(states.size(), cfg.threads, [&](std::size_t j) {
    const LocatedState& st = states[j];
    const JostValues jv = jost_solution(v, cplx(0.0, st.kappa), cfg, {}, true);
    const Mat& p = st.P;
    const Mat b = (identity(n) - p) + p * jv.gram * p;
    Mat b_inv_sqrt;
    double min_eig = 0.0;
    if (!inverse_sqrt_hpd(hermitian_part(b), b_inv_sqrt, &min_eig)) {
      std::ostringstream msg;
      msg << "normalization matrix at kappa = " << st.kappa << " is not positive (min eigenvalue " << min_eig << ")";
      throw ScatteringError(ErrorCode::NotPositive, msg.str());
    }
    out[j] = validate_bound_state(st.kappa, hermitian_part(b_inv_sqrt * p));
  });
  return out;
}

BoundStateSolution bound_state_solution(const JostValues& profile, const Mat& m) {
  BoundStateSolution out;
  out.kappa = profile.k.imag();
  out.x = profile.x;
  out.psi0 = profile.f0 * m;
  out.dpsi0 = profile.fp0 * m;
  out.psi.reserve(profile.f.size());
  double envelope = norm2(out.psi0);
  for (std::size_t i = 0; i < profile.f.size(); ++i) {
    out.psi.push_back(profile.f[i] * m);
    envelope = std::max(envelope, norm2(out.psi.back()) * std::exp(out.kappa * profile.x[i]));
  }
  out.decay_envelope = envelope;
  out.square_integrable = out.kappa > 0.0 && std::isfinite(envelope);
  return out;
}

DirectResult solve_direct(const Potential& v, const BoundaryCondition& bc, const DirectConfig& cfg) {
  ScatteringMatrixResult sm = scattering_matrix(v, bc, cfg);
  DirectResult res;
  res.located = locate_bound_states(v, bc, cfg);
  sm.data.bound_states = normalization_matrices(v, res.located, cfg);
  res.data = validate_scattering_data(std::move(sm.data));
  res.jost = std::move(sm.jost);
  return res;
}

}  // namespace halfline
