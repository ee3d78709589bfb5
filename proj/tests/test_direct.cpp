#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "halfline/direct.hpp"
#include "halfline/fixtures.hpp"
#include "halfline/oracles.hpp"
#include "support.hpp"

using namespace halfline;
using halfline::testing::Rng;

namespace {

DirectConfig small_grid() {
  DirectConfig c;
  c.k_count = 256;
  return c;
}

double s_deviation(const ScatteringData& s, const Mat& target) {
  double err = 0.0;
  for (const Mat& m : s.S) err = std::max(err, norm2(m - target));
  return err;
}

/// Scalar square well of depth v0 and width a with Dirichlet condition:
/// bound states solve q cot(q a) = -kappa with q^2 = v0 - kappa^2.
double dirichlet_well_kappa(double v0, double a) {
  auto g = [&](double kappa) {
    const double q = std::sqrt(v0 - kappa * kappa);
    return q * std::cos(q * a) + kappa * std::sin(q * a);
  };
  double lo = 1e-6, hi = std::sqrt(v0) - 1e-9;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(lo) * g(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

/// 1 / int_0^inf f(i kappa, x)^2 dx for the same well, f = e^{-kappa x}
/// outside and a matched sine inside.
double dirichlet_well_norm(double v0, double a, double kappa) {
  const double q = std::sqrt(v0 - kappa * kappa);
  const double amp = std::exp(-kappa * a) / std::sin(q * a);
  const double inside = amp * amp * (a / 2.0 - std::sin(2.0 * q * a) / (4.0 * q));
  const double outside = std::exp(-2.0 * kappa * a) / (2.0 * kappa);
  return 1.0 / (inside + outside);
}

}  // namespace

TEST_CASE("direct: V = 0 Dirichlet gives S = -I and Neumann gives S = +I") {
  const Potential v = zero_potential(1, 10.0);
  const DirectResult d = solve_direct(v, diagonal_boundary(testing::angles({kPi})), small_grid());
  const DirectResult nm = solve_direct(v, diagonal_boundary(testing::angles({kPi / 2})), small_grid());
  CHECK(s_deviation(d.data, -identity(1)) <= 1e-10);
  CHECK(s_deviation(nm.data, identity(1)) <= 1e-10);
  CHECK(d.data.bound_states.empty());
  CHECK(nm.data.bound_states.empty());
}

TEST_CASE("direct: Robin data match the closed form") {
  for (double th : {kPi / 6, kPi / 4, kPi / 3}) {
    const std::vector<double> t{th};
    const DirectResult r = solve_direct(zero_potential(1, 10.0), diagonal_boundary(t), small_grid());
    double err = 0.0;
    for (std::size_t i = 0; i < r.data.k_grid.size(); ++i)
      err = std::max(err, norm2(r.data.S[i] - zero_potential_oracle(t, r.data.k_grid[i]).S));
    CHECK(err <= 1e-8);
    REQUIRE(r.data.bound_states.size() == 1);
    CHECK(std::abs(r.data.bound_states[0].kappa - 1.0 / std::tan(th)) <= 1e-8);
    CHECK(std::abs(r.data.bound_states[0].M(0, 0) - std::sqrt(2.0 / std::tan(th))) <= 1e-8);
  }
}

TEST_CASE("direct: 2x2 diagonal boundary with one Robin channel") {
  const std::vector<double> t{kPi, kPi / 4};
  const DirectResult r = solve_direct(zero_potential(2, 10.0), diagonal_boundary(t), small_grid());
  REQUIRE(r.data.bound_states.size() == 1);
  CHECK(r.data.bound_states[0].multiplicity == 1);
  const ZeroPotentialValues z = zero_potential_oracle(t, cplx(0.0, 1.0));
  CHECK(norm2(r.data.bound_states[0].M - z.bound_states[0].M) <= 1e-8);
}

TEST_CASE("direct: Jost solution agrees with the layer oracle over three decades of k") {
  const DirectConfig cfg;
  const double tol = std::max(1e-8, 100.0 * cfg.ode_tol);
  for (const Fixture& f : nontrivial_fixtures()) {
    const auto* spec = std::get_if<StepPotentialSpec>(&f.potential.form());
    if (!spec) continue;
    for (cplx k : {cplx(0.06, 0.0), cplx(0.6, 0.0), cplx(6.0, 0.0), cplx(60.0, 0.0), cplx(-13.0, 0.0),
                   cplx(0.0, 0.7), cplx(2.0, 1.5)}) {
      const JostValues j = jost_solution(f.potential, k, cfg);
      const StepJostValues o = step_jost_oracle(*spec, f.potential.n(), k);
      const double scale = std::max(1.0, std::abs(k));
      CAPTURE(f.name);
      CAPTURE(k);
      CHECK(norm2(j.f0 - o.f0) <= tol);
      CHECK(norm2(j.fp0 - o.fp0) <= tol * scale);
    }
  }
}

TEST_CASE("direct: random hermitian steps give unitary, symmetric S") {
  Rng rng(31);
  DirectConfig cfg;
  cfg.k_count = 64;
  cfg.k_max = 20.0;
  for (int trial = 0; trial < 6; ++trial) {
    const int n = rng.integer(1, 3);
    StepPotentialSpec spec{{0.7, 1.6}, {rng.hermitian(n, 0.8), rng.hermitian(n, 0.8)}};
    const Potential v = step_potential(spec, 5.0);
    const ScatteringMatrixResult r = scattering_matrix(v, rng.boundary(n), cfg);
    for (std::size_t i = 0; i < r.data.k_grid.size(); ++i) {
      const Mat& s = r.data.S[i];
      CHECK(norm2(s * s.adjoint() - identity(n)) <= 1e-8);
      CHECK(norm2(r.data.S[r.data.mirror(i)] - s.adjoint()) <= 1e-8);
    }
  }
}

TEST_CASE("direct: physical solution satisfies the boundary condition") {
  Rng rng(8);
  const DirectConfig cfg;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = rng.integer(1, 3);
    const Potential v = exponential_potential(rng.hermitian(n), 1.5, 10.0);
    const BoundaryCondition bc = rng.boundary(n);
    const double k = rng.uniform(0.3, 8.0);
    const JostValues fm = jost_solution(v, -k, cfg), fp = jost_solution(v, k, cfg);
    const Mat jk = jost_matrix(fm.f0, fm.fp0, bc);
    const Mat jmk = jost_matrix(fp.f0, fp.fp0, bc);
    const Mat s = -jmk * jk.inverse();
    const Mat psi0 = physical_solution(fm.f0, fp.f0, s);
    const Mat dpsi0 = physical_solution(fm.fp0, fp.fp0, s);
    CHECK(norm2(-bc.B().adjoint() * psi0 + bc.A().adjoint() * dpsi0) <= 1e-8 * std::max(1.0, k));
  }
}

TEST_CASE("direct: regular solution of the free equation") {
  const std::vector<double> t{kPi / 3};
  const BoundaryCondition bc = diagonal_boundary(t);
  const std::vector<double> x{0.5, 1.0, 2.5};
  const double k = 1.7;
  const RegularSolution r = regular_solution(zero_potential(1, 5.0), bc, k, x, DirectConfig{});
  for (std::size_t i = 0; i < x.size(); ++i) {
    const cplx ref = bc.A()(0, 0) * std::cos(k * x[i]) + bc.B()(0, 0) * std::sin(k * x[i]) / k;
    CHECK(std::abs(r.phi[i](0, 0) - ref) <= 1e-9);
  }
}

TEST_CASE("direct: square-well bound state against the transcendental equation") {
  const double v0 = 4.0, a = 1.5;
  const StepPotentialSpec spec{{a}, {testing::scalar(-v0)}};
  const DirectResult r = solve_direct(step_potential(spec, 10.0), diagonal_boundary(testing::angles({kPi})), small_grid());
  REQUIRE(r.data.bound_states.size() == 1);
  const double kappa = dirichlet_well_kappa(v0, a);
  CHECK(std::abs(r.data.bound_states[0].kappa - kappa) <= 1e-8);
  const double m2 = dirichlet_well_norm(v0, a, kappa);
  CHECK(std::abs(std::norm(r.data.bound_states[0].M(0, 0)) - m2) <= 1e-7);
}

TEST_CASE("direct: bound-state profile decays") {
  const double kappa = 1.0;
  const std::vector<double> x{0.0, 1.0, 2.0, 4.0, 8.0};
  const JostValues j = jost_solution(zero_potential(1, 10.0), cplx(0.0, kappa), DirectConfig{}, x);
  const BoundStateSolution b = bound_state_solution(j, testing::scalar(std::sqrt(2.0)));
  CHECK(b.square_integrable);
  CHECK(std::abs(b.psi.back()(0, 0) - std::sqrt(2.0) * std::exp(-8.0)) <= 1e-9);
}

TEST_CASE("direct: bound state at the edge of the scan is inconclusive") {
  DirectConfig cfg = small_grid();
  cfg.kappa_max = 1.004;
  try {
    solve_direct(zero_potential(1, 10.0), diagonal_boundary(testing::angles({kPi / 4})), cfg);
    FAIL("expected ScanInconclusive");
  } catch (const ScatteringError& e) {
    CHECK(e.code() == ErrorCode::ScanInconclusive);
  }
}

TEST_CASE("direct: config validation") {
  DirectConfig cfg;
  cfg.k_count = 2;
  CHECK_THROWS_AS(check_config(cfg), ScatteringError);
  cfg = DirectConfig{};
  cfg.kappa_max = cfg.kappa_min / 2;
  CHECK_THROWS_AS(check_config(cfg), ScatteringError);
}

TEST_CASE("direct: thread count does not change the output") {
  DirectConfig one = small_grid(), many = small_grid();
  many.threads = 4;
  const Fixture f = nontrivial_fixtures()[3];
  const DirectResult a = solve_direct(f.potential, f.boundary, one);
  const DirectResult b = solve_direct(f.potential, f.boundary, many);
  for (std::size_t i = 0; i < a.data.S.size(); ++i) CHECK(a.data.S[i] == b.data.S[i]);
}

TEST_CASE("direct: S does not depend on the representative (A T, B T)") {
  Rng rng(17);
  DirectConfig cfg;
  cfg.k_count = 64;
  cfg.k_max = 20.0;
  const Fixture f = nontrivial_fixtures()[4];  // exp_2x2_bound
  const ScatteringMatrixResult base = scattering_matrix(f.potential, f.boundary, cfg);
  for (int trial = 0; trial < 3; ++trial) {
    const Mat t = rng.invertible(2);
    const ScatteringMatrixResult moved = scattering_matrix(f.potential, transform_boundary(f.boundary, t), cfg);
    for (std::size_t i = 0; i < base.data.S.size(); ++i) {
      CHECK(norm2(moved.data.S[i] - base.data.S[i]) <= 1e-9);
      CHECK(norm2(moved.jost.J[i] - base.jost.J[i] * t) <= 1e-9 * std::max(1.0, norm2(base.jost.J[i] * t)));
    }
  }
}

TEST_CASE("direct: diagonal free data decouple by channel") {
  const DirectResult r = solve_direct(zero_potential(2, 10.0), diagonal_boundary(testing::angles({kPi, kPi / 2})), small_grid());
  Mat expected = Mat::Zero(2, 2);
  expected(0, 0) = -1.0;
  expected(1, 1) = 1.0;
  CHECK(s_deviation(r.data, expected) <= 1e-10);
  CHECK(r.data.bound_states.empty());
  // cot(3 pi / 4) < 0: J(i kappa) = cos(theta) - kappa sin(theta) never vanishes.
  const DirectResult neg = solve_direct(zero_potential(1, 10.0), diagonal_boundary(testing::angles({3 * kPi / 4})), small_grid());
  CHECK(neg.data.bound_states.empty());
}

TEST_CASE("direct: free Jost solution is e^{ikx}") {
  const DirectConfig cfg;
  const std::vector<double> x{0.0, 0.5, 2.0, 7.5};
  for (cplx k : {cplx(0.3, 0.0), cplx(-4.0, 0.0), cplx(25.0, 0.0), cplx(0.0, 1.5), cplx(3.0, 0.5)}) {
    const JostValues j = jost_solution(zero_potential(1, 10.0), k, cfg, x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CAPTURE(k);
      CHECK(std::abs(j.f[i](0, 0) - std::exp(kI * k * x[i])) <= 10.0 * cfg.ode_tol);
    }
  }
}

TEST_CASE("direct: physical solution of the free equation") {
  const DirectConfig cfg;
  const std::vector<double> x{0.0, 0.4, 1.3, 3.0};
  const double k = 2.2;
  const Potential v = zero_potential(1, 10.0);
  const JostValues fp = jost_solution(v, k, cfg, x), fm = jost_solution(v, -k, cfg, x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const cplx neumann = physical_solution(fm.f[i], fp.f[i], identity(1))(0, 0);
    const cplx dirichlet = physical_solution(fm.f[i], fp.f[i], -identity(1))(0, 0);
    CHECK(std::abs(neumann - 2.0 * std::cos(k * x[i])) <= 1e-9);
    CHECK(std::abs(dirichlet + 2.0 * kI * std::sin(k * x[i])) <= 1e-9);
  }
}

TEST_CASE("direct: regular solution from Jost solutions") {
  // phi(k,x) = [f(k,x) J(-k) - f(-k,x) J(k)] / (2ik), and Psi = -2ik phi J(k)^{-1}.
  const DirectConfig cfg;
  const std::vector<double> x{0.0, 0.7, 1.5, 2.5, 4.0};
  for (const Fixture& f : nontrivial_fixtures()) {
    for (double k : {0.4, 3.0, 11.0}) {
      const JostValues fp = jost_solution(f.potential, k, cfg, x), fm = jost_solution(f.potential, -k, cfg, x);
      const Mat jk = jost_matrix(fm.f0, fm.fp0, f.boundary);
      const Mat jmk = jost_matrix(fp.f0, fp.fp0, f.boundary);
      const Mat s = -jmk * jk.inverse();
      const RegularSolution r = regular_solution(f.potential, f.boundary, k, x, cfg);
      for (std::size_t i = 0; i < x.size(); ++i) {
        const Mat phi = (fp.f[i] * jmk - fm.f[i] * jk) / (2.0 * kI * k);
        CAPTURE(f.name);
        CAPTURE(k);
        CHECK(norm2(r.phi[i] - phi) <= 1e-8 * std::max(1.0, norm2(phi)));
        const Mat psi = physical_solution(fm.f[i], fp.f[i], s);
        CHECK(norm2(psi + 2.0 * kI * k * r.phi[i] * jk.inverse()) <= 1e-8 * std::max(1.0, norm2(psi)));
      }
    }
  }
}

TEST_CASE("direct: Dirichlet S is minus the classical one, other conditions agree") {
  const StepPotentialSpec spec{{0.5, 1.5}, {testing::scalar(-3.0), testing::scalar(1.0)}};
  const Potential v = step_potential(spec, 10.0);
  const DirectConfig cfg = small_grid();
  for (double th : {kPi, kPi / 3, 2 * kPi / 3}) {
    const ScatteringMatrixResult r = scattering_matrix(v, diagonal_boundary(testing::angles({th})), cfg);
    for (std::size_t i = 0; i < r.data.k_grid.size(); i += 17) {
      const double k = r.data.k_grid[i];
      const StepJostValues p = step_jost_oracle(spec, 1, k), m = step_jost_oracle(spec, 1, -k);
      cplx classical;
      if (th == kPi) {
        classical = m.f0(0, 0) / p.f0(0, 0);
        CHECK(std::abs(r.data.S[i](0, 0) + classical) <= 1e-8);
      } else {
        const double c = 1.0 / std::tan(th);
        classical = -(m.fp0(0, 0) + c * m.f0(0, 0)) / (p.fp0(0, 0) + c * p.f0(0, 0));
        CHECK(std::abs(r.data.S[i](0, 0) - classical) <= 1e-8);
      }
    }
  }
}

TEST_CASE("direct: equal diagonal wells give a doubly degenerate bound state") {
  const double v0 = 4.0, a = 1.5;
  const StepPotentialSpec spec{{a}, {Mat(-v0 * identity(2))}};
  const DirectResult r = solve_direct(step_potential(spec, 10.0), diagonal_boundary(testing::angles({kPi, kPi})), small_grid());
  REQUIRE(r.data.bound_states.size() == 1);
  const BoundState& b = r.data.bound_states[0];
  CHECK(b.multiplicity == 2);
  CHECK(Eigen::JacobiSVD<Mat>(b.M).singularValues().minCoeff() > 1e-3);
  // Each channel is the scalar well.
  const double kappa = dirichlet_well_kappa(v0, a);
  CHECK(std::abs(b.kappa - kappa) <= 1e-8);
  CHECK(norm2(b.M * b.M - dirichlet_well_norm(v0, a, kappa) * identity(2)) <= 1e-7);

  // Unequal wells: two simple bound states, one per channel.
  const StepPotentialSpec split{{a}, {Mat(Eigen::Vector2cd(-v0, -12.0).asDiagonal())}};
  const DirectResult s = solve_direct(step_potential(split, 10.0), diagonal_boundary(testing::angles({kPi, kPi})), small_grid());
  // A Dirichlet well holds floor(sqrt(v0) a / pi + 1/2) states: one at depth 4, two at depth 12.
  int total = 0, matched = 0;
  for (const BoundState& bs : s.data.bound_states) {
    CHECK(bs.multiplicity == 1);
    total += bs.multiplicity;
    matched += std::abs(bs.kappa - kappa) <= 1e-8;
  }
  CHECK(total == 3);
  CHECK(matched == 1);
}

TEST_CASE("direct: bound-state solutions satisfy the boundary condition") {
  const DirectConfig cfg;
  for (const Fixture& f : nontrivial_fixtures()) {
    const DirectResult r = solve_direct(f.potential, f.boundary, small_grid());
    for (const BoundState& b : r.data.bound_states) {
      const std::vector<double> x{0.0, 1.0, 3.0, 6.0};
      const BoundStateSolution psi = bound_state_solution(jost_solution(f.potential, cplx(0.0, b.kappa), cfg, x), b.M);
      CAPTURE(f.name);
      CHECK(norm2(-f.boundary.B().adjoint() * psi.psi0 + f.boundary.A().adjoint() * psi.dpsi0) <= 1e-8);
      CHECK(psi.square_integrable);
    }
  }
}

TEST_CASE("direct: single-layer oracle at k = 2") {
  const StepPotentialSpec spec{{1.0}, {testing::scalar(-1.0)}};
  const JostValues j = jost_solution(step_potential(spec, 5.0), 2.0, DirectConfig{});
  const StepJostValues o = step_jost_oracle(spec, 1, 2.0);
  CHECK(norm2(j.f0 - o.f0) <= 1e-9);
  CHECK(norm2(j.fp0 - o.fp0) <= 1e-9);
}
