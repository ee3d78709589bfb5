#include "halfline/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "halfline/parallel.hpp"

namespace halfline {

namespace {

constexpr double kMaxInverseCond = 1e10;
constexpr double kSnapTol = 1e-3;
constexpr double kSpectralTol = 1e-6;

double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

Mat from_row(const Eigen::RowVectorXcd& row, int n) {
  Mat out(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out(i, j) = row(j * n + i);
  return out;
}

/// Solves min |Phi X - Y| column by column after normalizing the columns of
/// Phi.
Mat scaled_least_squares(Mat phi, const Mat& y) {
  Eigen::VectorXd scale(phi.cols());
  for (Eigen::Index c = 0; c < phi.cols(); ++c) {
    scale(c) = phi.col(c).norm();
    if (scale(c) > 0.0) phi.col(c) /= scale(c);
  }
  Mat x = phi.colPivHouseholderQr().solve(y);
  for (Eigen::Index c = 0; c < phi.cols(); ++c)
    if (scale(c) > 0.0) x.row(c) /= scale(c);
  return x;
}

cplx phase_at(double k, double y) { return std::polar(1.0, k * y); }

}  // namespace

void check_config(const InverseConfig& cfg) {
  auto bad = [](const std::string& what) { throw ScatteringError(ErrorCode::DimensionMismatch, "inverse config: " + what); };
  if (!(cfg.x_max > 0.0)) bad("x_max must be positive");
  if (!(cfg.h > 0.0) || cfg.h > cfg.x_max) bad("h must be positive and below x_max");
  if (!(cfg.y_max_value() >= 2.0 * cfg.x_max - 0.5 * cfg.h)) bad("y_max must be at least 2 x_max");
  if (cfg.k_lo && !(*cfg.k_lo > 0.0)) bad("k_lo must be positive");
  if (cfg.tail_order < 1 || cfg.tail_order > 8) bad("tail_order must lie in [1, 8]");
  if (!(cfg.tail_lambda > 0.0)) bad("tail_lambda must be positive");
  if (!(cfg.solver_tol > 0.0)) bad("solver_tol must be positive");
  if (cfg.fd_order != 2 && cfg.fd_order != 4) bad("fd_order must be 2 or 4");
  if (!(cfg.truncation_tol > 0.0)) bad("truncation_tol must be positive");
}

int kernel_half_count(const InverseConfig& cfg) {
  int half = static_cast<int>(std::lround(cfg.y_max_value() / cfg.h));
  if (half % 2) ++half;
  return half;
}

Mat TailFit::model(double k) const {
  const int n = static_cast<int>(S_inf.rows());
  Mat out = Mat::Zero(n, n);
  const cplx t = 1.0 / (lambda + kI * k);
  cplx tm = t;
  for (const Mat& c : C) {
    out += tm * c;
    tm *= t;
  }
  return out;
}

Mat TailFit::model_transform(double y, bool derivative) const {
  const int n = static_cast<int>(S_inf.rows());
  Mat out = Mat::Zero(n, n);
  if (y < 0.0) return out;
  const double e = std::exp(-lambda * y);
  for (std::size_t i = 0; i < C.size(); ++i) {
    const int m = static_cast<int>(i) + 1;
    double value;
    if (!derivative) {
      value = std::pow(y, m - 1) * e / factorial(m - 1);
    } else {
      const double lead = m >= 2 ? (m - 1) * std::pow(y, m - 2) : 0.0;
      value = (lead - lambda * std::pow(y, m - 1)) * e / factorial(m - 1);
    }
    out += value * C[i];
  }
  return out;
}

TailFit tail_fit(const ScatteringData& s, const InverseConfig& cfg) {
  const int n = s.n;
  const double k_max = std::max(std::abs(s.k_grid.front()), std::abs(s.k_grid.back()));
  const double k_lo = cfg.k_lo.value_or(0.5 * k_max);
  if (!(k_lo < k_max)) throw ScatteringError(ErrorCode::DimensionMismatch, "tail window is empty (k_lo >= k_max)");
  std::vector<std::size_t> window;
  for (std::size_t i = 0; i < s.k_grid.size(); ++i)
    if (std::abs(s.k_grid[i]) >= k_lo) window.push_back(i);
  const int p = cfg.tail_order;
  if (window.size() < static_cast<std::size_t>(3 * (p + 1)))
    throw ScatteringError(ErrorCode::DimensionMismatch, "tail window holds too few grid points for the fit order");

  const auto rows = static_cast<Eigen::Index>(window.size());
  Mat phi(rows, p + 1);
  Mat y(rows, static_cast<Eigen::Index>(n) * n);
  double s_scale = 0.0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double k = s.k_grid[window[static_cast<std::size_t>(r)]];
    const Mat& sk = s.S[window[static_cast<std::size_t>(r)]];
    const cplx t = 1.0 / (cfg.tail_lambda + kI * k);
    cplx tm = 1.0;
    for (int c = 0; c <= p; ++c) {
      phi(r, c) = tm;
      tm *= t;
    }
    y.row(r) = Eigen::Map<const Eigen::RowVectorXcd>(sk.data(), sk.size());
    s_scale = std::max(s_scale, norm2(sk));
  }

  TailFit fit;
  fit.lambda = cfg.tail_lambda;
  fit.k_lo = k_lo;
  fit.k_max = k_max;

  const Mat joint = scaled_least_squares(phi, y);
  const HermitianEigen eig = hermitian_eigen(from_row(joint.row(0), n));
  Eigen::VectorXd signs(n);
  double defect = 0.0;
  for (int i = 0; i < n; ++i) {
    signs(i) = eig.values(i) >= 0.0 ? 1.0 : -1.0;
    defect = std::max(defect, std::abs(eig.values(i) - signs(i)));
  }
  fit.involution_defect = defect;
  fit.S_inf = hermitian_part(eig.vectors * signs.cast<cplx>().asDiagonal() * eig.vectors.adjoint());

  // Refit the decaying part with the snapped limit held fixed.
  const Mat s_inf_row = Eigen::Map<const Eigen::RowVectorXcd>(fit.S_inf.data(), fit.S_inf.size());
  Mat y_tail = y;
  for (Eigen::Index r = 0; r < rows; ++r) y_tail.row(r) -= s_inf_row;
  const Mat coeffs = scaled_least_squares(phi.rightCols(p), y_tail);
  fit.C.resize(static_cast<std::size_t>(p));
  for (int m = 0; m < p; ++m) fit.C[static_cast<std::size_t>(m)] = hermitian_part(from_row(coeffs.row(m), n));
  fit.G1 = fit.C.front();

  double sq = 0.0;
  for (std::size_t w : window) {
    const Mat misfit = s.S[w] - fit.S_inf - fit.model(s.k_grid[w]);
    sq += misfit.squaredNorm();
  }
  fit.residual = std::sqrt(sq / static_cast<double>(window.size())) / std::max(s_scale, 1e-300);

  if (defect > kSnapTol || fit.residual > 1e-3) {
    std::ostringstream msg;
    msg << "S(k) has not settled on the tail window [" << k_lo << ", " << k_max << "]: involution defect " << defect
        << ", relative misfit " << fit.residual;
    throw ScatteringError(ErrorCode::TailNotSettled, msg.str());
  }
  return fit;
}

std::vector<Mat> fourier_Fs(const ScatteringData& s, const TailFit& tail, std::span<const double> y, bool derivative,
                            bool taper) {
  const int n = s.n;
  const std::vector<double> w = cell_weights(s.k_grid);
  const double k_end = s.k_grid.back();
  std::vector<Mat> rem(s.k_grid.size());
  for (std::size_t i = 0; i < s.k_grid.size(); ++i) {
    const double k = s.k_grid[i];
    double sigma = 1.0;
    if (taper && std::abs(k) > 0.5 * k_end) {
      const double c = std::cos(kPi * (std::abs(k) / k_end - 0.5));
      sigma = c * c;
    }
    rem[i] = (s.S[i] - tail.S_inf - tail.model(k)) * (sigma * w[i] / (2.0 * kPi));
    if (derivative) rem[i] *= kI * k;
  }
  std::vector<Mat> out(y.size());
  for (std::size_t l = 0; l < y.size(); ++l) {
    Mat acc = Mat::Zero(n, n);
    for (std::size_t i = 0; i < rem.size(); ++i) acc += phase_at(s.k_grid[i], y[l]) * rem[i];
    out[l] = acc + tail.model_transform(y[l], derivative);
  }
  return out;
}

std::vector<Mat> assemble_F(std::span<const double> y, std::span<const Mat> fs,
                            std::span<const BoundState> bound_states, bool derivative) {
  std::vector<Mat> out(fs.begin(), fs.end());
  for (const BoundState& b : bound_states) {
    const Mat m2 = b.M * b.M;
    for (std::size_t l = 0; l < y.size(); ++l) {
      const double e = std::exp(-b.kappa * y[l]);
      out[l] += (derivative ? -b.kappa * e : e) * m2;
    }
  }
  return out;
}

namespace {

int node_count(std::span<const Mat> f, int m) {
  const int half = (static_cast<int>(f.size()) - 1) / 2;
  return half - m + 1;
}

}  // namespace

Mat marchenko_operator(std::span<const Mat> f, double h, int m, QuadRule rule) {
  const int n = static_cast<int>(f[0].rows());
  const int nodes = node_count(f, m);
  if (nodes < 1) throw ScatteringError(ErrorCode::DimensionMismatch, "x lies beyond the kernel grid");
  const std::vector<double> w = uniform_weights(nodes, h, rule);
  const int d = n * nodes;
  Mat a = Mat::Identity(d, d);
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) a.block(i * n, j * n, n, n) += w[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(2 * m + i + j)];
  return a;
}

Mat marchenko_symmetric_operator(std::span<const Mat> f, double h, int m, QuadRule rule) {
  const int n = static_cast<int>(f[0].rows());
  const int nodes = node_count(f, m);
  if (nodes < 1) throw ScatteringError(ErrorCode::DimensionMismatch, "x lies beyond the kernel grid");
  const std::vector<double> w = uniform_weights(nodes, h, rule);
  const int d = n * nodes;
  Mat a = Mat::Identity(d, d);
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j)
      a.block(i * n, j * n, n, n) += std::sqrt(std::max(w[static_cast<std::size_t>(i)], 0.0) * std::max(w[static_cast<std::size_t>(j)], 0.0)) *
                                     f[static_cast<std::size_t>(2 * m + i + j)];
  return hermitian_part(a);
}

MarchenkoRow solve_marchenko(std::span<const Mat> f, std::span<const Mat> df, double h, int m, QuadRule rule,
                             double solver_tol) {
  if (f.empty() || f.size() % 2 == 0)
    throw ScatteringError(ErrorCode::DimensionMismatch, "Marchenko samples need an odd count (even L)");
  const int n = static_cast<int>(f[0].rows());
  const int nodes = node_count(f, m);
  const Mat a = marchenko_operator(f, h, m, rule);
  const int d = n * nodes;

  MarchenkoRow row;
  row.x = m * h;
  row.h = h;
  Mat rhs(n, d);
  for (int j = 0; j < nodes; ++j) rhs.block(0, j * n, n, n) = -f[static_cast<std::size_t>(2 * m + j)];

  const Eigen::PartialPivLU<Mat> lu(a.transpose());
  row.rcond = lu.rcond();
  if (!(row.rcond * kMaxInverseCond >= 1.0)) {
    std::ostringstream msg;
    msg << "Marchenko operator at x = " << row.x << " is numerically singular (rcond " << row.rcond << ")";
    throw ScatteringError(ErrorCode::SingularOperator, msg.str());
  }
  const Mat kvec = lu.solve(rhs.transpose()).transpose();
  const double scale = std::max(1.0, max_abs(rhs));
  row.residual = max_abs(kvec * a - rhs) / scale;
  if (!all_finite(kvec)) throw ScatteringError(ErrorCode::NonFinite, "Marchenko solution is not finite");
  if (row.residual > 10.0 * solver_tol) {
    std::ostringstream msg;
    msg << "Marchenko residual " << row.residual << " at x = " << row.x << " exceeds tolerance";
    throw ScatteringError(ErrorCode::SingularOperator, msg.str());
  }
  row.K.resize(static_cast<std::size_t>(nodes));
  for (int j = 0; j < nodes; ++j) row.K[static_cast<std::size_t>(j)] = kvec.block(0, j * n, n, n);

  if (!df.empty()) {
    const Mat& kxx = row.K[0];
    Mat rhs_x(n, d);
    for (int j = 0; j < nodes; ++j) {
      const auto idx = static_cast<std::size_t>(2 * m + j);
      rhs_x.block(0, j * n, n, n) = -(df[idx] - kxx * f[idx]);
    }
    const Mat kx = lu.solve(rhs_x.transpose()).transpose();
    row.Kx.resize(static_cast<std::size_t>(nodes));
    for (int j = 0; j < nodes; ++j) row.Kx[static_cast<std::size_t>(j)] = kx.block(0, j * n, n, n);
  }
  return row;
}

Potential recover_potential(std::span<const Mat> k_diag, double h, int fd_order) {
  const std::vector<Mat> dk = uniform_derivative(k_diag, h, fd_order);
  SampledForm form;
  form.x.resize(k_diag.size());
  form.values.resize(k_diag.size());
  for (std::size_t m = 0; m < k_diag.size(); ++m) {
    form.x[m] = static_cast<double>(m) * h;
    form.values[m] = hermitian_part(-2.0 * dk[m]);
    if (!all_finite(form.values[m])) throw ScatteringError(ErrorCode::NonFinite, "recovered potential is not finite");
  }
  return validate_potential(form, form.x.back());
}

BoundaryCondition recover_boundary(const Mat& s_inf, const Mat& g1, const Mat& k00) {
  const int n = static_cast<int>(s_inf.rows());
  const HermitianEigen eig = hermitian_eigen(s_inf);
  Mat p_plus = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double lam = eig.values(i);
    if (std::abs(std::abs(lam) - 1.0) > kSpectralTol) {
      std::ostringstream msg;
      msg << "S_inf eigenvalue " << lam << " is not +-1";
      throw ScatteringError(ErrorCode::SpectralFailure, msg.str());
    }
    if (lam > 0.0) p_plus += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
  }
  const Mat p_minus = identity(n) - p_plus;
  const Mat c = hermitian_part(g1 - s_inf * k00 - k00 * s_inf);
  const Mat b = 0.5 * p_plus * c * p_plus + p_minus;
  return validate_boundary(p_plus, hermitian_part(b));
}

namespace {

Mat transform_row(const std::vector<Mat>& values, double x0, double h, cplx k, QuadRule rule) {
  const int n = static_cast<int>(values[0].rows());
  if (std::abs(k) * h <= 0.5) {
    const std::vector<double> w = uniform_weights(static_cast<int>(values.size()), h, rule);
    Mat acc = Mat::Zero(n, n);
    for (std::size_t j = 0; j < values.size(); ++j)
      acc += (w[j] * std::exp(kI * k * (x0 + static_cast<double>(j) * h))) * values[j];
    return acc;
  }
  return filon_linear(values, x0, h, k);
}

}  // namespace

Mat reconstruct_jost(const MarchenkoRow& row, cplx k, QuadRule rule) {
  const int n = static_cast<int>(row.K[0].rows());
  return std::exp(kI * k * row.x) * identity(n) + transform_row(row.K, row.x, row.h, k, rule);
}

Mat reconstruct_jost_derivative(const MarchenkoRow& row, cplx k, QuadRule rule) {
  if (row.Kx.empty()) throw ScatteringError(ErrorCode::DimensionMismatch, "kernel row carries no x-derivative");
  const int n = static_cast<int>(row.K[0].rows());
  const cplx e = std::exp(kI * k * row.x);
  return kI * k * e * identity(n) - e * row.K[0] + transform_row(row.Kx, row.x, row.h, k, rule);
}

RecoveredInput invert(const ScatteringData& raw, const InverseConfig& cfg) {
  check_config(cfg);
  const ScatteringData s = validate_scattering_data(raw);
  const int n = s.n;
  TailFit tail = tail_fit(s, cfg);

  const int half = kernel_half_count(cfg);
  const double h = cfg.h;

  std::vector<double> y(static_cast<std::size_t>(2 * half + 1));
  for (int l = -half; l <= half; ++l) y[static_cast<std::size_t>(l + half)] = l * h;
  std::vector<Mat> fs = fourier_Fs(s, tail, y);

  const std::span<const double> y_pos(y.data() + half, static_cast<std::size_t>(half) + 1);
  const std::span<const Mat> fs_pos(fs.data() + half, static_cast<std::size_t>(half) + 1);
  std::vector<Mat> f = assemble_F(y_pos, fs_pos, s.bound_states);
  std::vector<Mat> df = uniform_derivative(f, h, cfg.fd_order);

  InverseDiagnostics diag;
  diag.tail_residual = tail.residual;
  diag.involution_defect = tail.involution_defect;
  diag.F_at_ymax = norm2(f.back());
  for (const Mat& v : fs) diag.Fs_hermiticity = std::max(diag.Fs_hermiticity, max_abs(v - v.adjoint()));
  for (std::size_t i : {std::size_t{0}, s.k_grid.size() - 1}) {
    const double k = s.k_grid[i];
    diag.fourier_tail_bound =
        std::max(diag.fourier_tail_bound, std::abs(k) / kPi * norm2(s.S[i] - tail.S_inf - tail.model(k)));
  }
  const double truncation_limit = std::max(cfg.truncation_tol, diag.fourier_tail_bound);
  if (diag.F_at_ymax > truncation_limit) {
    std::ostringstream msg;
    msg << "|F(y_max)| = " << diag.F_at_ymax << " exceeds " << truncation_limit << "; increase y_max";
    throw ScatteringError(ErrorCode::TruncationTooShort, msg.str());
  }

  const int x_count = half / 2 + 1;
  std::vector<MarchenkoRow> rows(static_cast<std::size_t>(x_count));
  parallel_for(rows.size(), cfg.threads, [&](std::size_t m) {
    rows[m] = solve_marchenko(f, m == 0 ? std::span<const Mat>(df) : std::span<const Mat>(), h, static_cast<int>(m),
                              cfg.quad, cfg.solver_tol);
  });

  std::vector<Mat> k_diag(rows.size());
  std::vector<double> x_nodes(rows.size());
  for (std::size_t m = 0; m < rows.size(); ++m) {
    k_diag[m] = rows[m].K[0];
    x_nodes[m] = rows[m].x;
    diag.max_marchenko_residual = std::max(diag.max_marchenko_residual, rows[m].residual);
    diag.min_rcond = std::min(diag.min_rcond, rows[m].rcond);
  }

  Potential v = recover_potential(k_diag, h, cfg.fd_order);
  BoundaryCondition bc = recover_boundary(tail.S_inf, tail.G1, k_diag[0]);

  MarchenkoKernel kernel;
  kernel.h = h;
  kernel.half_count = half;
  kernel.Fs = std::move(fs);
  kernel.F = std::move(f);
  kernel.x_nodes = std::move(x_nodes);
  kernel.K.reserve(rows.size());
  for (const MarchenkoRow& r : rows) kernel.K.push_back(r.K);
  (void)n;
  MarchenkoRow row0 = std::move(rows[0]);
  return RecoveredInput{std::move(v), std::move(bc), std::move(tail), std::move(kernel), std::move(df),
                        std::move(row0), std::move(k_diag), diag};
}

Mat reconstructed_jost_matrix(const RecoveredInput& rec, cplx k, QuadRule rule) {
  const cplx mk = -std::conj(k);
  const Mat f0 = reconstruct_jost(rec.row0, mk, rule);
  const Mat fp0 = reconstruct_jost_derivative(rec.row0, mk, rule);
  return f0.adjoint() * rec.bc.B() - fp0.adjoint() * rec.bc.A();
}

JostBundle reconstructed_jost_bundle(const RecoveredInput& rec, std::span<const double> k_grid, QuadRule rule) {
  JostBundle jb;
  jb.k_grid.assign(k_grid.begin(), k_grid.end());
  for (double k : k_grid) {
    jb.f0.push_back(reconstruct_jost(rec.row0, k, rule));
    jb.fp0.push_back(reconstruct_jost_derivative(rec.row0, k, rule));
    jb.J.push_back(reconstructed_jost_matrix(rec, k, rule));
  }
  return jb;
}

}  // namespace halfline
