#include "halfline/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace halfline {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw ScatteringError(ErrorCode::ParseError, what); }

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing key '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) parse_fail(std::string(what) + " must be a number");
  return j.get<double>();
}

int integer(const json& j, const char* what) {
  if (!j.is_number_integer()) parse_fail(std::string(what) + " must be an integer");
  return j.get<int>();
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Eigen::MatrixXd real_rows(const json& rows, int n, const char* what) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != n) parse_fail(std::string(what) + " must have n rows");
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    const json& r = rows[static_cast<std::size_t>(i)];
    if (!r.is_array() || static_cast<int>(r.size()) != n) parse_fail(std::string(what) + " must have n columns");
    for (int c = 0; c < n; ++c) m(i, c) = number(r[static_cast<std::size_t>(c)], what);
  }
  return m;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) parse_fail(std::string("unknown key '") + it.key() + "' in " + where);
}

}  // namespace

json matrix_to_json(const Mat& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rr = json::array(), ri = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(i, c).real());
      ri.push_back(m(i, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

Mat matrix_from_json(const json& j, int n) {
  if (j.is_number()) {
    if (n != 1) parse_fail("a bare number only describes a 1x1 matrix");
    return Mat::Constant(1, 1, cplx(j.get<double>(), 0.0));
  }
  if (j.is_array()) return real_rows(j, n, "matrix").cast<cplx>();
  if (!j.is_object()) parse_fail("matrix must be a number, an array or {re, im}");
  Eigen::MatrixXd re = real_rows(require(j, "re"), n, "matrix re");
  Eigen::MatrixXd im = j.contains("im") ? real_rows(j.at("im"), n, "matrix im") : Eigen::MatrixXd::Zero(n, n);
  Mat out(n, n);
  out.real() = re;
  out.imag() = im;
  return out;
}

json potential_to_json(const Potential& v) {
  json j{{"n", v.n()}, {"x_max", v.x_max()}};
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ZeroForm>) {
          j["closed_form"] = json{{"name", "zero"}};
        } else if constexpr (std::is_same_v<T, StepPotentialSpec>) {
          json layers = json::array();
          for (const Mat& l : f.layers) layers.push_back(matrix_to_json(l));
          j["closed_form"] = json{{"name", "step"}, {"boundaries", f.boundaries}, {"layers", std::move(layers)}};
        } else if constexpr (std::is_same_v<T, ExponentialForm>) {
          j["closed_form"] = json{{"name", "exponential"}, {"amplitude", matrix_to_json(f.amplitude)}, {"decay", f.decay}};
        } else {
          json samples = json::array();
          for (std::size_t i = 0; i < f.x.size(); ++i) samples.push_back(json{{"x", f.x[i]}, {"V", matrix_to_json(f.values[i])}});
          j["samples"] = std::move(samples);
        }
      },
      v.form());
  return j;
}

Potential potential_from_json(const json& j) {
  check_keys(j, {"n", "x_max", "closed_form", "samples", "description"}, "potential");
  const int n = integer(require(j, "n"), "n");
  if (n < 1) parse_fail("n must be positive");
  const double x_max = j.contains("x_max") ? number(j.at("x_max"), "x_max") : 0.0;
  if (j.contains("closed_form") == j.contains("samples")) parse_fail("potential needs exactly one of closed_form, samples");
  if (j.contains("samples")) {
    SampledForm raw;
    for (const json& s : require(j, "samples")) {
      raw.x.push_back(number(require(s, "x"), "sample x"));
      raw.values.push_back(matrix_from_json(require(s, "V"), n));
    }
    return validate_potential(raw, x_max);
  }
  const json& cf = j.at("closed_form");
  const std::string name = require(cf, "name").get<std::string>();
  const double xm = x_max > 0.0 ? x_max : 40.0;
  if (name == "zero") return zero_potential(n, xm);
  if (name == "step") {
    StepPotentialSpec spec;
    for (const json& b : require(cf, "boundaries")) spec.boundaries.push_back(number(b, "boundary"));
    for (const json& l : require(cf, "layers")) spec.layers.push_back(matrix_from_json(l, n));
    return step_potential(spec, xm);
  }
  if (name == "exponential")
    return exponential_potential(matrix_from_json(require(cf, "amplitude"), n), number(require(cf, "decay"), "decay"), xm);
  parse_fail("unknown closed_form '" + name + "'");
}

json boundary_to_json(const BoundaryCondition& bc) {
  return json{{"n", bc.n()}, {"A", matrix_to_json(bc.A())}, {"B", matrix_to_json(bc.B())}};
}

BoundaryCondition boundary_from_json(const json& j) {
  check_keys(j, {"n", "A", "B", "thetas", "description"}, "boundary");
  if (j.contains("thetas")) {
    std::vector<double> th;
    for (const json& t : j.at("thetas")) th.push_back(number(t, "theta"));
    if (th.empty()) parse_fail("thetas must not be empty");
    return diagonal_boundary(th);
  }
  const int n = integer(require(j, "n"), "n");
  if (n < 1) parse_fail("n must be positive");
  return validate_boundary(matrix_from_json(require(j, "A"), n), matrix_from_json(require(j, "B"), n));
}

json scattering_to_json(const ScatteringData& s) {
  json smats = json::array();
  for (const Mat& m : s.S) smats.push_back(matrix_to_json(m));
  json bs = json::array();
  for (const BoundState& b : s.bound_states)
    bs.push_back(json{{"kappa", b.kappa}, {"multiplicity", b.multiplicity}, {"M", matrix_to_json(b.M)}});
  return json{{"n", s.n}, {"k_grid", s.k_grid}, {"S", std::move(smats)}, {"bound_states", std::move(bs)}};
}

ScatteringData scattering_from_json(const json& j) {
  check_keys(j, {"n", "k_grid", "S", "bound_states", "description"}, "scattering data");
  ScatteringData s;
  s.n = integer(require(j, "n"), "n");
  if (s.n < 1) parse_fail("n must be positive");
  for (const json& k : require(j, "k_grid")) s.k_grid.push_back(number(k, "k"));
  for (const json& m : require(j, "S")) s.S.push_back(matrix_from_json(m, s.n));
  if (j.contains("bound_states")) {
    for (const json& b : j.at("bound_states")) {
      // multiplicity is informational; it is recomputed from the rank of M.
      check_keys(b, {"kappa", "multiplicity", "M"}, "bound state");
      const double kappa = number(require(b, "kappa"), "kappa");
      s.bound_states.push_back(BoundState{kappa, matrix_from_json(require(b, "M"), s.n), 0});
    }
  }
  return s;
}

void apply_config(const json& j, DirectConfig& d, InverseConfig& inv) {
  check_keys(j, {"direct", "inverse", "description"}, "config");
  if (j.contains("direct")) {
    const json& c = j.at("direct");
    check_keys(c, {"x_max", "ode_tol", "k_max", "k_count", "kappa_min", "kappa_max", "kappa_step", "det_tol"}, "direct config");
    if (c.contains("x_max")) d.x_max = number(c.at("x_max"), "x_max");
    if (c.contains("ode_tol")) d.ode_tol = number(c.at("ode_tol"), "ode_tol");
    if (c.contains("k_max")) d.k_max = number(c.at("k_max"), "k_max");
    if (c.contains("k_count")) d.k_count = integer(c.at("k_count"), "k_count");
    if (c.contains("kappa_min")) d.kappa_min = number(c.at("kappa_min"), "kappa_min");
    if (c.contains("kappa_max")) d.kappa_max = number(c.at("kappa_max"), "kappa_max");
    if (c.contains("kappa_step")) d.kappa_step = number(c.at("kappa_step"), "kappa_step");
    if (c.contains("det_tol")) d.det_tol = number(c.at("det_tol"), "det_tol");
  }
  if (j.contains("inverse")) {
    const json& c = j.at("inverse");
    check_keys(c, {"x_max", "y_max", "h", "k_lo", "tail_order", "tail_lambda", "quad", "solver_tol", "fd_order", "truncation_tol"},
               "inverse config");
    if (c.contains("x_max")) inv.x_max = number(c.at("x_max"), "x_max");
    if (c.contains("y_max")) inv.y_max = number(c.at("y_max"), "y_max");
    if (c.contains("h")) inv.h = number(c.at("h"), "h");
    if (c.contains("k_lo")) inv.k_lo = number(c.at("k_lo"), "k_lo");
    if (c.contains("tail_order")) inv.tail_order = integer(c.at("tail_order"), "tail_order");
    if (c.contains("tail_lambda")) inv.tail_lambda = number(c.at("tail_lambda"), "tail_lambda");
    if (c.contains("quad")) {
      const std::string q = c.at("quad").get<std::string>();
      if (q == "gregory") inv.quad = QuadRule::Gregory;
      else if (q == "trapezoid") inv.quad = QuadRule::Trapezoid;
      else parse_fail("quad must be 'gregory' or 'trapezoid'");
    }
    if (c.contains("solver_tol")) inv.solver_tol = number(c.at("solver_tol"), "solver_tol");
    if (c.contains("fd_order")) inv.fd_order = integer(c.at("fd_order"), "fd_order");
    if (c.contains("truncation_tol")) inv.truncation_tol = number(c.at("truncation_tol"), "truncation_tol");
  }
}

json config_to_json(const DirectConfig& d, const InverseConfig& inv) {
  json direct{{"ode_tol", d.ode_tol},       {"k_max", d.k_max},           {"k_count", d.k_count},
              {"kappa_min", d.kappa_min},   {"kappa_max", d.kappa_max},   {"kappa_step", d.kappa_step},
              {"det_tol", d.det_tol}};
  if (d.x_max) direct["x_max"] = *d.x_max;
  json inverse{{"x_max", inv.x_max},
               {"y_max", inv.y_max_value()},
               {"h", inv.h},
               {"tail_order", inv.tail_order},
               {"tail_lambda", inv.tail_lambda},
               {"quad", inv.quad == QuadRule::Gregory ? "gregory" : "trapezoid"},
               {"solver_tol", inv.solver_tol},
               {"fd_order", inv.fd_order},
               {"truncation_tol", inv.truncation_tol}};
  if (inv.k_lo) inverse["k_lo"] = *inv.k_lo;
  return json{{"direct", std::move(direct)}, {"inverse", std::move(inverse)}};
}

json recovered_to_json(const RecoveredInput& rec) {
  json coeffs = json::array();
  for (const Mat& c : rec.tail.C) coeffs.push_back(matrix_to_json(c));
  const InverseDiagnostics& d = rec.diagnostics;
  return json{{"potential", potential_to_json(rec.V)},
              {"boundary", boundary_to_json(rec.bc)},
              {"tail",
               {{"S_inf", matrix_to_json(rec.tail.S_inf)},
                {"G1", matrix_to_json(rec.tail.G1)},
                {"lambda", rec.tail.lambda},
                {"k_lo", rec.tail.k_lo},
                {"k_max", rec.tail.k_max},
                {"coefficients", std::move(coeffs)}}},
              {"diagnostics",
               {{"tail_residual", d.tail_residual},
                {"involution_defect", d.involution_defect},
                {"F_at_ymax", d.F_at_ymax},
                {"fourier_tail_bound", d.fourier_tail_bound},
                {"Fs_hermiticity", d.Fs_hermiticity},
                {"max_marchenko_residual", d.max_marchenko_residual},
                {"min_rcond", d.min_rcond}}}};
}

json report_to_json(const CharacterizationReport& rep) {
  json checks = json::array();
  for (const CheckEntry& c : rep.checks)
    checks.push_back(json{{"name", c.name},
                          {"verdict", to_string(c.verdict)},
                          {"value", finite_or_null(c.value)},
                          {"threshold", c.threshold},
                          {"detail", c.detail}});
  return json{{"n", rep.n},
              {"bound_states_data", rep.bound_states_data},
              {"bound_states_levinson", finite_or_null(rep.bound_states_levinson)},
              {"mu", rep.mu},
              {"n_dirichlet", rep.n_dirichlet},
              {"levinson_lhs", finite_or_null(rep.levinson_lhs)},
              {"levinson_rhs", finite_or_null(rep.levinson_rhs)},
              {"checks", std::move(checks)}};
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    parse_fail(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

namespace {

void write_entries_header(std::ostream& out, int n) {
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) out << ",re_" << r << '_' << c << ",im_" << r << '_' << c;
  out << '\n';
}

void write_entries(std::ostream& out, const Mat& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) out << ',' << m(r, c).real() << ',' << m(r, c).imag();
  out << '\n';
}

}  // namespace

void write_scattering_csv(const std::filesystem::path& path, const ScatteringData& s) {
  write_matrix_trace(path, "k", s.k_grid, s.S);
}

void write_matrix_trace(const std::filesystem::path& path, const std::string& coordinate, std::span<const double> x,
                        std::span<const Mat> values) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  const int n = values.empty() ? 0 : static_cast<int>(values[0].rows());
  out << coordinate;
  write_entries_header(out, n);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << x[i];
    write_entries(out, values[i]);
  }
}

}  // namespace halfline
