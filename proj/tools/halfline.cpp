// halfline: direct and inverse scattering for the half-line matrix
// Schrodinger equation from the command line.
//
// Exit codes:
//   direct     0 ok, 2 invalid input, 3 solver failure
//   inverse    0 ok, 2 invalid input or non-unitary S, 3 solver failure, 4 tail not settled
//   validate   0 all checks pass, 1 a hard check failed, 5 only inconclusive checks, 2 invalid input
//   roundtrip  0 within thresholds, 1 beyond thresholds, 2/3/4 as inverse
//   fixtures   0 ok

#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "halfline/characterize.hpp"
#include "halfline/direct.hpp"
#include "halfline/fixtures.hpp"
#include "halfline/inverse.hpp"
#include "halfline/io.hpp"
#include "halfline/oracles.hpp"
#include "halfline/roundtrip.hpp"

namespace fs = std::filesystem;
using namespace halfline;

namespace {

enum Exit { kOk = 0, kHardFail = 1, kInvalid = 2, kSolver = 3, kTail = 4, kInconclusive = 5 };

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SelfadjointnessViolated:
    case ErrorCode::RankDeficient:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NotHermitian:
    case ErrorCode::NonFiniteSample:
    case ErrorCode::AsymmetricGrid:
    case ErrorCode::BadBoundState:
    case ErrorCode::ParseError:
      return kInvalid;
    case ErrorCode::TailNotSettled:
      return kTail;
    default:
      return kSolver;
  }
}

/// Flag values start at the library defaults so --help shows them; only flags
/// actually given on the command line override the config file.
struct Overrides {
  DirectConfig d;
  InverseConfig inv;
  double d_x_max = 0.0;
  double y_max = 0.0;
  double k_lo = 0.0;
  std::string quad = "gregory";
  std::vector<std::pair<CLI::Option*, std::function<void(DirectConfig&, InverseConfig&)>>> set;

  template <class T>
  void bind(CLI::App* app, const std::string& name, T& slot, const std::string& help,
            std::function<void(DirectConfig&, InverseConfig&)> apply) {
    set.emplace_back(app->add_option(name, slot, help)->capture_default_str(), std::move(apply));
  }

  void apply(DirectConfig& dc, InverseConfig& ic) const {
    for (const auto& [opt, fn] : set)
      if (opt->count() > 0) fn(dc, ic);
  }
};

struct Common {
  std::string potential, boundary, scattering, config;
  std::string out = ".";
  int threads = 1;
  bool quiet = false;
};

void add_direct_flags(CLI::App* app, Overrides& o) {
  o.bind(app, "--x-max", o.d_x_max, "direct: integration start radius (0 = potential support)",
         [&o](DirectConfig& d, InverseConfig&) {
           if (o.d_x_max > 0.0) d.x_max = o.d_x_max;
           else d.x_max.reset();
         });
  o.bind(app, "--ode-tol", o.d.ode_tol, "direct: DOP853 relative/absolute tolerance",
         [&o](DirectConfig& d, InverseConfig&) { d.ode_tol = o.d.ode_tol; });
  o.bind(app, "--k-max", o.d.k_max, "direct: k grid spans [-k_max, k_max]",
         [&o](DirectConfig& d, InverseConfig&) { d.k_max = o.d.k_max; });
  o.bind(app, "--k-count", o.d.k_count, "direct: number of k nodes",
         [&o](DirectConfig& d, InverseConfig&) { d.k_count = o.d.k_count; });
  o.bind(app, "--kappa-max", o.d.kappa_max, "direct: upper end of the bound-state scan",
         [&o](DirectConfig& d, InverseConfig&) { d.kappa_max = o.d.kappa_max; });
  o.bind(app, "--kappa-step", o.d.kappa_step, "direct: bound-state scan step",
         [&o](DirectConfig& d, InverseConfig&) { d.kappa_step = o.d.kappa_step; });
  o.bind(app, "--det-tol", o.d.det_tol, "direct: relative singular-value threshold for J(i kappa)",
         [&o](DirectConfig& d, InverseConfig&) { d.det_tol = o.d.det_tol; });
}

void add_inverse_flags(CLI::App* app, Overrides& o) {
  o.bind(app, "--inv-x-max", o.inv.x_max, "inverse: recover V on [0, x_max]",
         [&o](DirectConfig&, InverseConfig& i) { i.x_max = o.inv.x_max; });
  o.bind(app, "--y-max", o.y_max, "inverse: Marchenko truncation (0 = 2 x_max)",
         [&o](DirectConfig&, InverseConfig& i) {
           if (o.y_max > 0.0) i.y_max = o.y_max;
           else i.y_max.reset();
         });
  o.bind(app, "--step", o.inv.h, "inverse: Nystrom grid spacing h",
         [&o](DirectConfig&, InverseConfig& i) { i.h = o.inv.h; });
  o.bind(app, "--k-lo", o.k_lo, "inverse: tail-fit window starts at |k| = k_lo (0 = k_max/2)",
         [&o](DirectConfig&, InverseConfig& i) {
           if (o.k_lo > 0.0) i.k_lo = o.k_lo;
           else i.k_lo.reset();
         });
  o.bind(app, "--tail-order", o.inv.tail_order, "inverse: number of 1/(lambda+ik)^m tail terms",
         [&o](DirectConfig&, InverseConfig& i) { i.tail_order = o.inv.tail_order; });
  o.bind(app, "--quad", o.quad, "inverse: Nystrom rule, gregory or trapezoid", [&o](DirectConfig&, InverseConfig& i) {
    if (o.quad == "gregory") i.quad = QuadRule::Gregory;
    else if (o.quad == "trapezoid") i.quad = QuadRule::Trapezoid;
    else throw ScatteringError(ErrorCode::ParseError, "--quad must be gregory or trapezoid");
  });
  o.bind(app, "--solver-tol", o.inv.solver_tol, "inverse: accepted relative Marchenko residual scale",
         [&o](DirectConfig&, InverseConfig& i) { i.solver_tol = o.inv.solver_tol; });
  o.bind(app, "--truncation-tol", o.inv.truncation_tol, "inverse: largest accepted |F(y_max)|",
         [&o](DirectConfig&, InverseConfig& i) { i.truncation_tol = o.inv.truncation_tol; });
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON config with \"direct\" and \"inverse\" sections")->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output directory")->capture_default_str();
  app->add_option("--threads", c.threads, "worker threads for grid loops")->capture_default_str()->check(
      CLI::Range(1, 256));
  app->add_flag("--quiet", c.quiet, "suppress the stdout summary");
}

void resolve(const Common& c, const Overrides& o, DirectConfig& d, InverseConfig& inv) {
  if (!c.config.empty()) apply_config(read_json(c.config), d, inv);
  o.apply(d, inv);
  d.threads = c.threads;
  inv.threads = c.threads;
  check_config(d);
  check_config(inv);
}

fs::path prepare_out(const Common& c) {
  fs::path dir(c.out);
  fs::create_directories(dir);
  return dir;
}

std::vector<double> uniform_nodes(double h, std::size_t count, double start = 0.0) {
  std::vector<double> y(count);
  for (std::size_t i = 0; i < count; ++i) y[i] = start + static_cast<double>(i) * h;
  return y;
}

void write_recovered_traces(const fs::path& dir, const RecoveredInput& rec) {
  const MarchenkoKernel& k = rec.kernel;
  const std::vector<double> y_all = uniform_nodes(k.h, k.Fs.size(), -k.y_max());
  write_matrix_trace(dir / "Fs.csv", "y", y_all, k.Fs);
  const std::vector<double> y_pos = uniform_nodes(k.h, k.F.size());
  write_matrix_trace(dir / "F.csv", "y", y_pos, k.F);
  write_matrix_trace(dir / "K_diag.csv", "x", k.x_nodes, rec.K_diag);
  const auto& v = std::get<SampledForm>(rec.V.form());
  write_matrix_trace(dir / "V.csv", "x", v.x, v.values);
}

void print_report(const CharacterizationReport& rep) {
  std::cout << std::left << std::setw(22) << "check" << std::setw(14) << "verdict" << std::setw(14) << "value"
            << std::setw(12) << "threshold" << "detail\n";
  for (const CheckEntry& c : rep.checks) {
    std::cout << std::left << std::setw(22) << c.name << std::setw(14) << to_string(c.verdict) << std::setw(14)
              << std::setprecision(4) << c.value << std::setw(12) << c.threshold << c.detail << "\n";
  }
}

int cmd_direct(const Common& c, const Overrides& o) {
  DirectConfig d;
  InverseConfig inv;
  resolve(c, o, d, inv);
  const Potential v = potential_from_json(read_json(c.potential));
  const BoundaryCondition bc = boundary_from_json(read_json(c.boundary));
  const DirectResult r = solve_direct(v, bc, d);
  const fs::path dir = prepare_out(c);
  write_json(dir / "scattering.json", scattering_to_json(r.data));
  write_scattering_csv(dir / "scattering.csv", r.data);
  write_matrix_trace(dir / "jost.csv", "k", r.jost.k_grid, r.jost.J);
  if (!c.quiet) {
    std::cout << "n = " << r.data.n << ", k nodes = " << r.data.k_grid.size()
              << ", bound states = " << r.data.bound_state_count() << "\n";
    for (const BoundState& b : r.data.bound_states)
      std::cout << "  kappa = " << std::setprecision(12) << b.kappa << "  multiplicity = " << b.multiplicity << "\n";
  }
  return kOk;
}

/// Unitarity and symmetry are checked before inverting; S outside the
/// Marchenko class at that level is bad input rather than a solver problem.
bool preflight(const ScatteringData& s) {
  const UnitarityResult u = check_unitarity_symmetry(s);
  if (u.verdict == Verdict::Pass) return true;
  std::cerr << "error: S fails unitarity/symmetry (residual " << u.residual << ")\n";
  return false;
}

int cmd_inverse(const Common& c, const Overrides& o) {
  DirectConfig d;
  InverseConfig inv;
  resolve(c, o, d, inv);
  const ScatteringData s = validate_scattering_data(scattering_from_json(read_json(c.scattering)));
  if (!preflight(s)) return kInvalid;
  const RecoveredInput rec = invert(s, inv);
  const fs::path dir = prepare_out(c);
  json out = recovered_to_json(rec);
  out["config"] = config_to_json(d, inv)["inverse"];
  write_json(dir / "recovered.json", out);
  write_recovered_traces(dir, rec);
  if (!c.quiet) {
    const InverseDiagnostics& g = rec.diagnostics;
    std::cout << "tail residual " << g.tail_residual << ", |F(y_max)| " << g.F_at_ymax << ", max Marchenko residual "
              << g.max_marchenko_residual << ", min rcond " << g.min_rcond << "\n";
  }
  return kOk;
}

int cmd_validate(const Common& c, const Overrides& o) {
  DirectConfig d;
  InverseConfig inv;
  resolve(c, o, d, inv);
  const ScatteringData s = validate_scattering_data(scattering_from_json(read_json(c.scattering)));
  const CharacterizationReport rep = marchenko_class_report(s, inv);
  const fs::path dir = prepare_out(c);
  write_json(dir / "report.json", report_to_json(rep));
  if (!c.quiet) print_report(rep);
  if (rep.any_fail()) return kHardFail;
  if (rep.any_inconclusive()) return kInconclusive;
  return kOk;
}

int cmd_roundtrip(const Common& c, const Overrides& o, const RoundtripThresholds& t) {
  DirectConfig d;
  InverseConfig inv;
  resolve(c, o, d, inv);
  const Potential v = potential_from_json(read_json(c.potential));
  const BoundaryCondition bc = boundary_from_json(read_json(c.boundary));
  const RoundtripResult r = roundtrip(v, bc, d, inv, t);
  const fs::path dir = prepare_out(c);
  json out{{"pass", r.pass},
           {"potential_error", r.potential_error},
           {"potential_window", r.potential_window},
           {"potential_threshold", t.potential},
           {"boundary_distance", r.boundary_distance},
           {"boundary_equivalent", r.boundary_equivalent},
           {"boundary_threshold", t.boundary},
           {"scattering_error", r.scattering_error},
           {"scattering_threshold", t.scattering},
           {"k_limit", r.k_limit},
           {"bound_states_forward", r.forward.data.bound_state_count()},
           {"bound_states_reproduced", r.reproduced->data.bound_state_count()},
           {"recovered_boundary", boundary_to_json(r.recovered->bc)},
           {"diagnostics", recovered_to_json(*r.recovered)["diagnostics"]},
           {"config", config_to_json(d, inv)}};
  write_json(dir / "roundtrip.json", out);
  write_recovered_traces(dir, *r.recovered);
  if (!c.quiet) {
    std::cout << "V relative L1 error " << r.potential_error << " on [0, " << r.potential_window << "]\n"
              << "boundary distance   " << r.boundary_distance << (r.boundary_equivalent ? " (equivalent)\n" : "\n")
              << "S error             " << r.scattering_error << " on |k| <= " << r.k_limit << "\n"
              << (r.pass ? "pass\n" : "fail\n");
  }
  return r.pass ? kOk : kHardFail;
}

/// V = 0 Dirichlet data with an extra bound state that no potential supports.
ScatteringData spurious_bound_state(std::span<const double> k) {
  const std::vector<double> theta{kPi};
  ScatteringData s = zero_potential_scattering(theta, k);
  s.bound_states.push_back(validate_bound_state(1.0, Mat::Constant(1, 1, std::sqrt(2.0))));
  return s;
}

ScatteringData perturbed_unitarity(std::span<const double> k) {
  const std::vector<double> theta{kPi / 2.0};
  ScatteringData s = zero_potential_scattering(theta, k);
  for (std::size_t i = 0; i < s.S.size(); ++i) s.S[i] *= 1.0 + 1e-3 * std::exp(-s.k_grid[i] * s.k_grid[i]);
  return s;
}

/// Unitary and symmetric, but S(k) = exp(2i sin k) never settles at large k.
ScatteringData unsettled_tail(std::span<const double> k) {
  ScatteringData s;
  s.n = 1;
  s.k_grid.assign(k.begin(), k.end());
  for (double kk : k) s.S.push_back(Mat::Constant(1, 1, std::exp(kI * 2.0 * std::sin(kk))));
  return s;
}

/// Dirichlet-like data whose F_s is a bump near y = 12: inside the Marchenko
/// class but concentrated past y_max / 2 for the default grid, so the
/// regularity heuristic cannot settle.
ScatteringData late_kernel(std::span<const double> k) {
  ScatteringData s;
  s.n = 1;
  s.k_grid.assign(k.begin(), k.end());
  for (double kk : k) s.S.push_back(Mat::Constant(1, 1, -std::exp(kI * 0.5 * std::sin(12.0 * kk) * std::exp(-kk * kk / 8.0))));
  return s;
}

/// Robin pi/4 data with the bound state dropped: I + F is singular at x = 0.
ScatteringData missing_bound_state(std::span<const double> k) {
  const std::vector<double> theta{kPi / 4.0};
  ScatteringData s = zero_potential_scattering(theta, k);
  s.bound_states.clear();
  return s;
}

int cmd_fixtures(const Common& c, const Overrides& o, bool with_scattering) {
  DirectConfig d;
  InverseConfig inv;
  resolve(c, o, d, inv);
  const fs::path dir = prepare_out(c);
  const std::vector<double> k = symmetric_k_grid(d.k_max, d.k_count);
  for (const Fixture& f : fixture_corpus()) {
    write_json(dir / (f.name + ".potential.json"), potential_to_json(f.potential));
    write_json(dir / (f.name + ".boundary.json"), boundary_to_json(f.boundary));
    if (with_scattering) write_json(dir / (f.name + ".scattering.json"), scattering_to_json(solve_direct(f.potential, f.boundary, d).data));
    if (!c.quiet) std::cout << f.name << ": " << f.description << "\n";
  }
  write_json(dir / "spurious_bound_state.scattering.json", scattering_to_json(spurious_bound_state(k)));
  write_json(dir / "perturbed_unitarity.scattering.json", scattering_to_json(perturbed_unitarity(k)));
  write_json(dir / "unsettled_tail.scattering.json", scattering_to_json(unsettled_tail(k)));
  write_json(dir / "missing_bound_state.scattering.json", scattering_to_json(missing_bound_state(k)));
  write_json(dir / "late_kernel.scattering.json", scattering_to_json(late_kernel(k)));
  const Fixture hf = high_frequency_fixture(32.0);
  write_json(dir / "high_frequency.potential.json", potential_to_json(hf.potential));
  write_json(dir / "high_frequency.boundary.json", boundary_to_json(hf.boundary));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direct and inverse scattering for the half-line matrix Schrodinger equation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "halfline 1.0");

  Common common;
  Overrides ov;
  RoundtripThresholds thresholds;
  bool with_scattering = false;

  CLI::App* direct = app.add_subcommand("direct", "potential + boundary -> scattering data");
  direct->add_option("--potential", common.potential, "potential JSON")->required()->check(CLI::ExistingFile);
  direct->add_option("--boundary", common.boundary, "boundary JSON")->required()->check(CLI::ExistingFile);
  add_common(direct, common);
  add_direct_flags(direct, ov);

  CLI::App* inverse = app.add_subcommand("inverse", "scattering data -> potential + boundary");
  inverse->add_option("--scattering", common.scattering, "scattering JSON")->required()->check(CLI::ExistingFile);
  add_common(inverse, common);
  add_inverse_flags(inverse, ov);

  CLI::App* validate = app.add_subcommand("validate", "Marchenko-class and Levinson checks on scattering data");
  validate->add_option("--scattering", common.scattering, "scattering JSON")->required()->check(CLI::ExistingFile);
  add_common(validate, common);
  add_inverse_flags(validate, ov);

  CLI::App* round = app.add_subcommand("roundtrip", "potential -> S -> potential' -> S' discrepancies");
  round->add_option("--potential", common.potential, "potential JSON")->required()->check(CLI::ExistingFile);
  round->add_option("--boundary", common.boundary, "boundary JSON")->required()->check(CLI::ExistingFile);
  add_common(round, common);
  add_direct_flags(round, ov);
  add_inverse_flags(round, ov);
  round->add_option("--max-potential-error", thresholds.potential, "relative L1 threshold for V")
      ->capture_default_str();
  round->add_option("--max-s-error", thresholds.scattering, "threshold for max |S - S'| on |k| <= k_max/2")
      ->capture_default_str();
  round->add_option("--max-boundary-distance", thresholds.boundary, "projector distance counted as equivalent")
      ->capture_default_str();

  CLI::App* fixtures = app.add_subcommand("fixtures", "write the fixture corpus as JSON files");
  add_common(fixtures, common);
  add_direct_flags(fixtures, ov);
  fixtures->add_flag("--with-scattering", with_scattering, "also solve the direct problem for every fixture");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (direct->parsed()) return cmd_direct(common, ov);
    if (inverse->parsed()) return cmd_inverse(common, ov);
    if (validate->parsed()) return cmd_validate(common, ov);
    if (round->parsed()) return cmd_roundtrip(common, ov, thresholds);
    if (fixtures->parsed()) return cmd_fixtures(common, ov, with_scattering);
  } catch (const ScatteringError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: ParseError: " << e.what() << "\n";
    return kInvalid;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
