#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "halfline/characterize.hpp"
#include "halfline/direct.hpp"
#include "halfline/fixtures.hpp"
#include "halfline/inverse.hpp"
#include "halfline/oracles.hpp"
#include "support.hpp"

using namespace halfline;

namespace {

ScatteringData robin_data(double theta, int count = 1024) {
  const std::vector<double> t{theta};
  return zero_potential_scattering(t, symmetric_k_grid(60.0, count));
}

double v_sup(const Potential& v) {
  double m = 0.0;
  for (double x = 0.0; x <= v.x_max(); x += 0.01) m = std::max(m, norm2(v(x)));
  return m;
}

ErrorCode invert_code(const ScatteringData& s, const InverseConfig& cfg) {
  try {
    invert(s, cfg);
  } catch (const ScatteringError& e) {
    return e.code();
  }
  FAIL("expected invert to throw");
  return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("marchenko: separable kernel against the closed form") {
  const SeparableKernel sk{1.0, 0.8};
  const double h = 0.025;
  const int half = 800;  // y_max = 20
  std::vector<Mat> f, df;
  for (int l = 0; l <= half; ++l) {
    f.push_back(testing::scalar(sk.F(l * h)));
    df.push_back(testing::scalar(-sk.kappa * sk.F(l * h)));
  }
  std::vector<Mat> diag;
  for (int m = 0; m <= half / 2; m += 1) {
    const MarchenkoRow row = solve_marchenko(f, df, h, m, QuadRule::Gregory, 1e-10);
    diag.push_back(row.K.front());
    if (m % 40 != 0) continue;
    double err = 0.0;
    for (std::size_t j = 0; j < row.K.size(); ++j) err = std::max(err, std::abs(row.K[j](0, 0) - sk.K(row.x, row.x + j * h)));
    CAPTURE(m);
    CHECK(err <= 1e-7);
    CHECK(row.residual <= 1e-9);
  }
  const Potential v = recover_potential(diag, h, 4);
  double err = 0.0;
  for (double x = 0.0; x <= 9.0; x += 0.1) err = std::max(err, std::abs(v(x)(0, 0).real() - sk.V(x)));
  CHECK(err <= 1e-5);
}

TEST_CASE("marchenko: trapezoid rule converges at second order") {
  const SeparableKernel sk{1.0, 0.8};
  double prev = 0.0;
  for (double h : {0.05, 0.025}) {
    const int half = static_cast<int>(std::lround(20.0 / h));
    std::vector<Mat> f;
    for (int l = 0; l <= half; ++l) f.push_back(testing::scalar(sk.F(l * h)));
    const MarchenkoRow row = solve_marchenko(f, {}, h, 0, QuadRule::Trapezoid, 1e-10);
    const double err = std::abs(row.K.front()(0, 0) - sk.K(0.0, 0.0));
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("inverse: tail fit of the Robin closed form") {
  for (double th : {kPi / 6, kPi / 4, kPi / 3}) {
    const TailFit t = tail_fit(robin_data(th), InverseConfig{});
    CHECK(norm2(t.S_inf - identity(1)) <= 1e-9);
    CHECK(std::abs(t.G1(0, 0) + 2.0 / std::tan(th)) <= 1e-6);
    CHECK(t.residual <= 1e-6);
  }
  const std::vector<double> d{kPi};
  const TailFit t = tail_fit(zero_potential_scattering(d, symmetric_k_grid(60.0, 256)), InverseConfig{});
  CHECK(norm2(t.S_inf + identity(1)) <= 1e-12);
  CHECK(norm2(t.G1) <= 1e-12);
}

TEST_CASE("inverse: Robin data cancel exactly and give V = 0") {
  for (double th : {kPi / 6, kPi / 4, kPi / 3}) {
    const RecoveredInput rec = invert(robin_data(th), InverseConfig{});
    double fmax = 0.0;
    for (const Mat& f : rec.kernel.F) fmax = std::max(fmax, norm2(f));
    CHECK(fmax <= 1e-6);
    CHECK(v_sup(rec.V) <= 1e-4);
    CHECK(boundary_equivalent(rec.bc, robin_marchenko_oracle(th).boundary(), 1e-6));
  }
}

TEST_CASE("inverse: F_s of the Robin data matches the oracle") {
  const double th = kPi / 4;
  const ScatteringData s = robin_data(th, 2048);
  const TailFit t = tail_fit(s, InverseConfig{});
  const RobinMarchenko o = robin_marchenko_oracle(th);
  const std::vector<double> y{-3.0, -0.5, 0.0, 0.3, 1.0, 4.0};
  const std::vector<Mat> fs = fourier_Fs(s, t, y);
  for (std::size_t i = 0; i < y.size(); ++i) {
    CAPTURE(y[i]);
    CHECK(std::abs(fs[i](0, 0) - o.Fs(y[i])) <= 1e-6);
  }
}

TEST_CASE("inverse: S = -I gives V = 0 with Dirichlet condition") {
  const std::vector<double> t{kPi};
  const RecoveredInput rec = invert(zero_potential_scattering(t, symmetric_k_grid(60.0, 256)), InverseConfig{});
  CHECK(v_sup(rec.V) <= 1e-8);
  CHECK(boundary_equivalent(rec.bc, diagonal_boundary(t)));
}

TEST_CASE("inverse: boundary recovery from S_inf, G1 and K(0,0)") {
  // Dirichlet: S_inf = -I ignores the rest.
  const BoundaryCondition d = recover_boundary(-identity(1), testing::scalar(0.7), testing::scalar(0.2));
  CHECK(boundary_equivalent(d, diagonal_boundary(testing::angles({kPi}))));
  // Robin with V = 0: G1 = -2 cot(theta), K(0,0) = 0.
  const double th = kPi / 3;
  const BoundaryCondition r = recover_boundary(identity(1), testing::scalar(-2.0 / std::tan(th)), testing::scalar(0.0));
  CHECK(boundary_equivalent(r, diagonal_boundary(testing::angles({th})), 1e-12));
  CHECK_THROWS_AS(recover_boundary(testing::scalar(0.3), testing::scalar(0.0), testing::scalar(0.0)), ScatteringError);
}

TEST_CASE("inverse: data without a settled tail are rejected") {
  std::vector<double> k = symmetric_k_grid(60.0, 512);
  ScatteringData s;
  s.n = 1;
  s.k_grid = k;
  for (double kk : k) s.S.push_back(Mat::Constant(1, 1, std::exp(kI * 2.0 * std::sin(kk))));
  CHECK(invert_code(s, InverseConfig{}) == ErrorCode::TailNotSettled);
}

TEST_CASE("inverse: a kernel that has not decayed is reported") {
  // Robin S without its bound state: F = F_s = -2 kappa e^{-kappa y}.
  ScatteringData s = robin_data(1.4, 512);
  s.bound_states.clear();
  InverseConfig cfg;
  cfg.x_max = 2.0;
  CHECK(invert_code(s, cfg) == ErrorCode::TruncationTooShort);
}

TEST_CASE("inverse: config validation") {
  InverseConfig cfg;
  cfg.h = -1.0;
  CHECK_THROWS_AS(check_config(cfg), ScatteringError);
  cfg = InverseConfig{};
  cfg.y_max = cfg.x_max;
  CHECK_THROWS_AS(check_config(cfg), ScatteringError);
}

TEST_CASE("inverse: reconstructed Jost matrix matches the direct one") {
  const Fixture f = nontrivial_fixtures()[2];  // exp_robin
  DirectConfig dc;
  const DirectResult d = solve_direct(f.potential, f.boundary, dc);
  InverseConfig ic;
  ic.h = 0.05;
  const RecoveredInput rec = invert(d.data, ic);
  for (double k : {0.5, 2.0, 7.0}) {
    const Mat jd = jost_matrix_at(f.potential, f.boundary, k, dc);
    const Mat jr = reconstructed_jost_matrix(rec, k, ic.quad);
    // J is only defined up to the right factor T of the boundary pair.
    const Mat sd = -jost_matrix_at(f.potential, f.boundary, -k, dc) * jd.inverse();
    const Mat sr = -reconstructed_jost_matrix(rec, -k, ic.quad) * jr.inverse();
    CHECK(norm2(sd - sr) <= 1e-3);
  }
  const Mat jb = reconstructed_jost_matrix(rec, cplx(0.0, d.data.bound_states[0].kappa), ic.quad);
  CHECK(norm2(jb.adjoint() * d.data.bound_states[0].M) <= 1e-3);
}

TEST_CASE("inverse: thread count does not change the output") {
  InverseConfig one, many;
  one.h = many.h = 0.05;
  many.threads = 3;
  const ScatteringData s = robin_data(kPi / 3, 512);
  const RecoveredInput a = invert(s, one), b = invert(s, many);
  for (std::size_t m = 0; m < a.K_diag.size(); ++m) CHECK(a.K_diag[m] == b.K_diag[m]);
}

TEST_CASE("marchenko: reconstructed Jost solution of a separable kernel") {
  // K(0,y) = -c e^{-kappa y} / D with D = 1 + c / (2 kappa), so
  // f(k,0) = 1 - (c / D) / (kappa - ik) and
  // f'(k,0) = ik + c / D + c (kappa / D - c / D^2) / (kappa - ik).
  // The row covers [0, y_max / 2]; y_max = 40 leaves an e^{-20} tail.
  const SeparableKernel sk{1.0, 1.0};
  const double h = 0.0125;
  const int half = 3200;
  std::vector<Mat> f, df;
  for (int l = 0; l <= half; ++l) {
    f.push_back(testing::scalar(sk.F(l * h)));
    df.push_back(testing::scalar(-sk.kappa * sk.F(l * h)));
  }
  const MarchenkoRow row = solve_marchenko(f, df, h, 0, QuadRule::Gregory, 1e-12);
  const double d = 1.0 + sk.c / (2.0 * sk.kappa);

  // The same potential through the ODE solver, sampled finely.
  SampledForm raw;
  for (double x = 0.0; x <= 14.0 + 1e-12; x += 0.001) {
    raw.x.push_back(x);
    raw.values.push_back(testing::scalar(sk.V(x)));
  }
  const Potential v = validate_potential(raw, 14.0);

  for (cplx k : {cplx(0.5, 0.0), cplx(-2.0, 0.0), cplx(6.0, 0.0), cplx(0.0, 0.6)}) {
    const cplx f0 = 1.0 - (sk.c / d) / (sk.kappa - kI * k);
    const cplx fp0 = kI * k + sk.c / d + sk.c * (sk.kappa / d - sk.c / (d * d)) / (sk.kappa - kI * k);
    CAPTURE(k);
    CHECK(std::abs(reconstruct_jost(row, k, QuadRule::Gregory)(0, 0) - f0) <= 1e-6);
    CHECK(std::abs(reconstruct_jost_derivative(row, k, QuadRule::Gregory)(0, 0) - fp0) <= 1e-6);
    const JostValues j = jost_solution(v, k, DirectConfig{});
    CHECK(std::abs(j.f0(0, 0) - f0) <= 1e-6);
    CHECK(std::abs(j.fp0(0, 0) - fp0) <= 1e-6);
  }
}

TEST_CASE("marchenko: F = 0 gives K = 0") {
  const std::vector<Mat> f(201, Mat::Zero(2, 2));
  const MarchenkoRow row = solve_marchenko(f, {}, 0.05, 10, QuadRule::Gregory, 1e-10);
  for (const Mat& k : row.K) CHECK(norm2(k) == 0.0);
}

TEST_CASE("inverse: F vanishes for diag(Dirichlet, Robin pi/4)") {
  const std::vector<double> th{kPi, kPi / 4};
  const ScatteringData s = zero_potential_scattering(th, symmetric_k_grid(60.0, 2048));
  const TailFit t = tail_fit(s, InverseConfig{});
  std::vector<double> y;
  for (int l = 0; l <= 200; ++l) y.push_back(l * 0.05);
  const std::vector<Mat> fs = fourier_Fs(s, t, y);
  const std::vector<Mat> f = assemble_F(y, fs, s.bound_states);
  const std::vector<Mat> f_plain = assemble_F(y, fs, {});
  for (std::size_t i = 0; i < y.size(); ++i) {
    CHECK(norm2(f[i]) <= 1e-6);
    CHECK(norm2(f_plain[i] - fs[i]) == 0.0);
    CHECK(std::abs(fs[i](0, 0)) <= 1e-12);  // Dirichlet channel: S - S_inf = 0
  }
}

TEST_CASE("inverse: F_s hermiticity and Marchenko residuals on direct data") {
  const Fixture f = nontrivial_fixtures()[4];  // exp_2x2_bound
  const DirectResult d = solve_direct(f.potential, f.boundary, DirectConfig{});
  InverseConfig ic;
  ic.h = 0.05;
  const RecoveredInput rec = invert(d.data, ic);
  CHECK(rec.diagnostics.Fs_hermiticity <= 1e-8);
  CHECK(rec.diagnostics.max_marchenko_residual <= 10.0 * ic.solver_tol);
}

TEST_CASE("inverse: 2x2 boundary recovery and basis invariance") {
  Mat s_inf = Mat::Zero(2, 2), g1 = Mat::Zero(2, 2);
  s_inf(0, 0) = -1.0;
  s_inf(1, 1) = 1.0;
  g1(1, 1) = -2.0;
  const Mat k00 = Mat::Zero(2, 2);
  const BoundaryCondition expected = diagonal_boundary(testing::angles({kPi, kPi / 4}));
  CHECK(boundary_equivalent(recover_boundary(s_inf, g1, k00), expected, 1e-12));

  testing::Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat u = rng.unitary(2);
    const BoundaryCondition rotated = recover_boundary(u * s_inf * u.adjoint(), u * g1 * u.adjoint(), k00);
    const BoundaryCondition target = validate_boundary(u * expected.A() * u.adjoint(), u * expected.B() * u.adjoint());
    CHECK(boundary_equivalent(rotated, target, 1e-10));
  }
}

TEST_CASE("inverse: reconstructed Jost data of the Robin fixture") {
  const double th = kPi / 4;
  const ScatteringData s = robin_data(th);
  const InverseConfig ic;
  const RecoveredInput rec = invert(s, ic);
  const JostBundle b = reconstructed_jost_bundle(rec, s.k_grid, ic.quad);
  CHECK(check_jost_consistency(s, b).residual <= 1e-6);
  const Mat jb = reconstructed_jost_matrix(rec, cplx(0.0, 1.0), ic.quad);
  CHECK(norm2(jb.adjoint() * s.bound_states[0].M) <= 1e-6);
}
