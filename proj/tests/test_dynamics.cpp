#include <doctest.h>

#include <cmath>
#include <complex>

#include "mems/dynamics.hpp"
#include "test_helpers.hpp"

using namespace mems;

namespace {

struct DynFixture {
  ModelParams params;
  Grid1D grid1;
  Grid2D grid2;
  PlateOperator op;
  FractionalNormContext ctx;

  explicit DynFixture(ModelParams p)
      : params(p),
        grid1(Grid1D::make(p.n_interior)),
        grid2(Grid2D::make(grid1, p.m_interior)),
        op(grid1, p.beta, p.tau),
        ctx(op, p.alpha(), p.tol_linear) {}
};

ModelParams small_params() {
  ModelParams p;
  p.n_interior = 63;
  p.m_interior = 15;
  p.lambda = 0.0;
  p.gamma = 0.2;
  p.dt = 1e-3;
  p.t_end = 0.5;
  p.stride = 10;
  return p;
}

// exact solution of gamma^2 z'' + z' + mu z = 0, z(0) = z0, z'(0) = v0
double damped_mode(double gamma, double mu, double z0, double v0, double t) {
  const std::complex<double> disc =
      std::sqrt(std::complex<double>(1.0 - 4.0 * gamma * gamma * mu));
  const std::complex<double> r1 = (-1.0 + disc) / (2.0 * gamma * gamma);
  const std::complex<double> r2 = (-1.0 - disc) / (2.0 * gamma * gamma);
  const std::complex<double> a = (v0 - r2 * z0) / (r1 - r2);
  const std::complex<double> b = (r1 * z0 - v0) / (r1 - r2);
  return (a * std::exp(r1 * t) + b * std::exp(r2 * t)).real();
}

}  // namespace

TEST_CASE("unforced zero data stays zero with zero residual") {
  DynFixture f(small_params());
  NonlinearityEvaluator gev(f.grid2, f.params);
  const std::vector<double> zero(63, 0.0);
  const TrajectoryResult r = run_trajectory(zero, zero, f.params, f.op, f.ctx, gev);
  CHECK(r.record.status == Termination::Completed);
  for (const TrajectorySample& s : r.record.samples) {
    CHECK(s.sup_u == 0.0);
    CHECK(s.min_gap == 1.0);
    CHECK(s.in_S_alpha_half);
  }
  for (const LedgerRow& row : r.ledger.rows) CHECK(row.residual == 0.0);
}

TEST_CASE("inadmissible initial data is rejected") {
  DynFixture f(small_params());
  NonlinearityEvaluator gev(f.grid2, f.params);
  const std::vector<double> bad(63, -0.9);  // gap below kappa
  const std::vector<double> zero(63, 0.0);
  CHECK_THROWS_AS(run_trajectory(bad, zero, f.params, f.op, f.ctx, gev), AdmissibilityError);
}

TEST_CASE("parabolic single-mode diagonal recursion is exact") {
  ModelParams p = small_params();
  p.gamma = 0.0;
  p.dt = 1e-3;
  p.t_end = 0.05;
  p.stride = 1;
  DynFixture f(p);
  NonlinearityEvaluator gev(f.grid2, p);
  std::vector<double> u0 = f.ctx.eigenvector(0);
  for (double& v : u0) v *= 0.1;
  const std::vector<double> zero(63, 0.0);
  const TrajectoryResult r = run_trajectory(u0, zero, p, f.op, f.ctx, gev);
  const double mu1 = f.ctx.mu1();
  double prev_norm = 1e300;
  for (std::size_t s = 0; s < r.record.samples.size(); ++s) {
    const double factor = std::pow(1.0 + p.dt * mu1, -static_cast<double>(s));
    for (int i = 0; i < 63; ++i) {
      CHECK(r.record.samples[s].u[i] ==
            doctest::Approx(factor * u0[i]).epsilon(1e-10).scale(0.1));
    }
    const double nrm = f.ctx.norm(r.record.samples[s].u, 0.0);
    CHECK(nrm <= prev_norm + 1e-15);  // spectral contraction
    prev_norm = nrm;
  }
}

TEST_CASE("wave integrator matches the characteristic-root oracle at order 2") {
  for (double gamma : {0.2, 1.0}) {
    double errs[3];
    int li = 0;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
      ModelParams p = small_params();
      p.gamma = gamma;
      p.dt = dt;
      p.t_end = 1.0;
      p.stride = 1 << 20;
      DynFixture f(p);
      NonlinearityEvaluator gev(f.grid2, p);
      std::vector<double> u0 = f.ctx.eigenvector(0);
      for (double& v : u0) v *= 0.1;
      const std::vector<double> zero(63, 0.0);
      const TrajectoryResult r = run_trajectory(u0, zero, p, f.op, f.ctx, gev);
      const double zT = damped_mode(gamma, f.ctx.mu1(), 0.1, 0.0, 1.0);
      const std::vector<double> e1 = f.ctx.eigenvector(0);
      double err = 0.0;
      for (int i = 0; i < 63; ++i)
        err = std::max(err, std::abs(r.record.final_u[i] - zT * e1[i]));
      errs[li++] = err;
    }
    CHECK(std::log2(errs[0] / errs[1]) >= 1.8);
    CHECK(std::log2(errs[1] / errs[2]) >= 1.8);
  }
}

TEST_CASE("energy-equality residual converges at order 2 in dt") {
  // lambda = 0 single-mode runs; the only defect left by the midpoint scheme
  // is the trapezoidal time quadrature of the dissipation integral
  for (double gamma : {0.05, 0.2, 1.0}) {
    double prev = 0.0;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
      ModelParams p = small_params();
      p.gamma = gamma;
      p.dt = dt;
      p.t_end = 1.0;
      p.stride = 1;
      DynFixture f(p);
      NonlinearityEvaluator gev(f.grid2, p);
      std::vector<double> u0 = f.ctx.eigenvector(0);
      for (double& v : u0) v *= 0.1;
      const std::vector<double> zero(63, 0.0);
      const TrajectoryResult r = run_trajectory(u0, zero, p, f.op, f.ctx, gev);
      double rmax = 0.0;
      for (const LedgerRow& row : r.ledger.rows) rmax = std::max(rmax, std::abs(row.residual));
      if (prev > 0.0) CHECK(std::log2(prev / rmax) >= 1.8);
      prev = rmax;
    }
  }
}

TEST_CASE("dissipation is nondecreasing and strictly increases while moving") {
  ModelParams p = small_params();
  p.gamma = 0.5;
  p.t_end = 0.3;
  p.stride = 5;
  DynFixture f(p);
  NonlinearityEvaluator gev(f.grid2, p);
  const std::vector<double> zero(63, 0.0);
  std::vector<double> u1 = f.ctx.eigenvector(0);
  const TrajectoryResult r = run_trajectory(zero, u1, p, f.op, f.ctx, gev);
  double prev = -1.0;
  for (const LedgerRow& row : r.ledger.rows) {
    CHECK(row.dissipation >= prev);
    if (prev >= 0.0) CHECK(row.dissipation > prev);  // velocity never dies exactly
    prev = row.dissipation;
  }
}

TEST_CASE("even initial data produce even displacements") {
  ModelParams p = small_params();
  p.lambda = 0.3;
  p.eps = 0.3;
  p.gamma = 0.2;
  p.t_end = 0.1;
  p.stride = 10;
  DynFixture f(p);
  NonlinearityEvaluator gev(f.grid2, p);
  const std::vector<double> u0 = test_helpers::bump(f.grid1, -0.1);
  const std::vector<double> zero(63, 0.0);
  const TrajectoryResult r = run_trajectory(u0, zero, p, f.op, f.ctx, gev);
  for (const TrajectorySample& s : r.record.samples) {
    double asym = 0.0;
    for (int i = 0; i < 63; ++i) asym = std::max(asym, std::abs(s.u[i] - s.u[62 - i]));
    CHECK(asym <= 1e-10);
  }
}

TEST_CASE("wave scheme stays stable as gamma -> 0 at fixed dt") {
  for (double gamma : {1e-2, 1e-4, 1e-8}) {
    ModelParams p = small_params();
    p.gamma = gamma;
    p.dt = 2e-3;
    p.t_end = 0.5;
    p.stride = 25;
    DynFixture f(p);
    NonlinearityEvaluator gev(f.grid2, p);
    std::vector<double> u0 = f.ctx.eigenvector(0);
    for (double& v : u0) v *= 0.1;
    const std::vector<double> zero(63, 0.0);
    const TrajectoryResult r = run_trajectory(u0, zero, p, f.op, f.ctx, gev);
    CHECK(r.record.status == Termination::Completed);
    const double n0 = f.ctx.norm(u0, 1.0);
    for (const TrajectorySample& s : r.record.samples) {
      CHECK(s.norm_h2 <= n0 * (1.0 + 1e-9));  // no growth for lambda = 0
    }
  }
}

TEST_CASE("strong forcing reaches touchdown; detection reports center location") {
  ModelParams p;
  p.n_interior = 63;
  p.m_interior = 15;
  p.lambda = 50.0;
  p.eps = 0.3;
  p.gamma = 0.0;
  p.dt = 2e-5;
  p.t_end = 0.1;
  p.stride = 10;
  DynFixture f(p);
  NonlinearityEvaluator gev(f.grid2, p);
  const std::vector<double> zero(63, 0.0);
  const TrajectoryResult r = run_trajectory(zero, zero, p, f.op, f.ctx, gev);
  REQUIRE(r.record.status == Termination::Touchdown);
  const auto td = detect_touchdown(r.record, f.grid1);
  REQUIRE(td.has_value());
  CHECK(td->t_c > 0.0);
  CHECK(td->t_c <= r.record.t_final + p.dt);
  CHECK(std::abs(td->x_c) <= f.grid1.h + 1e-15);  // symmetric touchdown at the center

  // min-gap series decreasing near termination
  const std::size_t nsteps = r.record.min_gap_series.size();
  for (std::size_t k = nsteps - std::min<std::size_t>(20, nsteps - 1); k < nsteps; ++k) {
    CHECK(r.record.min_gap_series[k] < r.record.min_gap_series[k - 1]);
  }
}

TEST_CASE("touchdown detection is absent for completed runs") {
  DynFixture f(small_params());
  NonlinearityEvaluator gev(f.grid2, f.params);
  const std::vector<double> zero(63, 0.0);
  const TrajectoryResult r = run_trajectory(zero, zero, f.params, f.op, f.ctx, gev);
  CHECK_FALSE(detect_touchdown(r.record, f.grid1).has_value());
}

TEST_CASE("small forcing with small data completes inside S_alpha(kappa/2)") {
  ModelParams p = small_params();
  p.lambda = 0.1;
  p.eps = 0.3;
  p.gamma = 0.2;
  p.t_end = 1.0;
  DynFixture f(p);
  NonlinearityEvaluator gev(f.grid2, p);
  const std::vector<double> u0 = test_helpers::bump(f.grid1, -0.02);
  const std::vector<double> zero(63, 0.0);
  const TrajectoryResult r = run_trajectory(u0, zero, p, f.op, f.ctx, gev);
  CHECK(r.record.status == Termination::Completed);
  for (const TrajectorySample& s : r.record.samples) CHECK(s.in_S_alpha_half);
}

TEST_CASE("norm guard trips as a blowup report, distinct from touchdown") {
  ModelParams p = small_params();
  p.gamma = 1.0;
  p.kappa = 0.9;  // tight norm bound 2/kappa
  p.dt = 1e-3;
  p.t_end = 1.0;
  DynFixture f(p);
  NonlinearityEvaluator gev(f.grid2, p);
  const std::vector<double> zero(63, 0.0);
  std::vector<double> u1 = f.ctx.eigenvector(0);
  for (double& v : u1) v *= 40.0;  // violent start swings the norm past 2/kappa
  const TrajectoryResult r = run_trajectory(zero, u1, p, f.op, f.ctx, gev);
  CHECK(r.record.status == Termination::BlowupGuard);
  CHECK(r.record.guard_norm > 2.0 / p.kappa);
}
