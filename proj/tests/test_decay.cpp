#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>

#include "mems/decay.hpp"
#include "test_helpers.hpp"

using namespace mems;

namespace {

struct DecayFixture {
  ModelParams params;
  Grid1D grid1;
  Grid2D grid2;
  PlateOperator op;
  FractionalNormContext ctx;

  explicit DecayFixture(ModelParams p)
      : params(p),
        grid1(Grid1D::make(p.n_interior)),
        grid2(Grid2D::make(grid1, p.m_interior)),
        op(grid1, p.beta, p.tau),
        ctx(op, p.alpha(), p.tol_linear) {}
};

ModelParams decay_params(double gamma) {
  ModelParams p;
  p.n_interior = 63;
  p.m_interior = 15;
  p.lambda = 0.0;
  p.gamma = gamma;
  p.dt = 5e-4;
  p.t_end = 2.0;
  p.stride = 5;
  return p;
}

}  // namespace

TEST_CASE("decay constants: worked values and limits") {
  const LyapunovConfig c1 = decay_constants(1.0);
  CHECK(c1.b == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c1.omega == doctest::Approx(0.2).epsilon(1e-15));

  // gamma_1 -> 0+: the 1/(2 c_1) branch wins, omega -> 1/4
  const LyapunovConfig c0 = decay_constants(1e-10);
  CHECK(c0.b == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c0.omega == doctest::Approx(0.25).epsilon(1e-9));

  // gamma_1 = 2: b = min{2/10, 1/2, 1/2} = 1/5, omega = (1/5)/(2 + 2/5) = 1/12
  const LyapunovConfig c2 = decay_constants(2.0);
  CHECK(c2.b == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(c2.omega == doctest::Approx(1.0 / 12.0).epsilon(1e-15));

  CHECK_THROWS_AS(decay_constants(0.0), ParameterError);
  CHECK_THROWS_AS(decay_constants(-1.0), ParameterError);

  double prev = std::numeric_limits<double>::infinity();
  for (double g1 = 0.125; g1 <= 8.0; g1 *= 2.0) {
    const double w = decay_constants(g1).omega;
    CHECK(w <= prev + 1e-15);
    prev = w;
  }
}

TEST_CASE("zero trajectory gives identically zero functionals") {
  DecayFixture f(decay_params(0.5));
  NonlinearityEvaluator gev(f.grid2, f.params);
  const std::vector<double> zero(63, 0.0);
  const TrajectoryResult r = run_trajectory(zero, zero, f.params, f.op, f.ctx, gev);
  const LyapunovConfig lyap = decay_constants(f.params.gamma1, f.ctx.alpha());
  const DecayTrace tr = evaluate_decay_trace(r.record, zero, lyap, f.params, f.op, f.ctx);
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    CHECK(tr.energy[i] == 0.0);
    CHECK(tr.cross[i] == 0.0);
    CHECK(tr.lyapunov[i] == 0.0);
  }
  CHECK(tr.violations.empty());
}

TEST_CASE("constant forcing: f = -A u0 and the sandwich inequalities hold") {
  DecayFixture f(decay_params(0.5));
  NonlinearityEvaluator gev(f.grid2, f.params);
  const std::vector<double> u0 = test_helpers::bump(f.grid1, -0.05);
  const std::vector<double> zero(63, 0.0);
  const TrajectoryResult r = run_trajectory(u0, zero, f.params, f.op, f.ctx, gev);
  const LyapunovConfig lyap = decay_constants(f.params.gamma1, f.ctx.alpha());
  const DecayTrace tr = evaluate_decay_trace(r.record, u0, lyap, f.params, f.op, f.ctx);
  CHECK(tr.violations.empty());
  const double f0 = tr.f_norm.front();
  for (double fn : tr.f_norm) CHECK(fn == doctest::Approx(f0).epsilon(1e-10));
  // Gronwall envelope with constant forcing
  const DecayReport rep = verify_decay_inequality(tr, lyap);
  CHECK(rep.pass);
  CHECK_FALSE(rep.homogeneous);
}

TEST_CASE("initial values from the definitions") {
  DecayFixture f(decay_params(0.5));
  NonlinearityEvaluator gev(f.grid2, f.params);
  const std::vector<double> zero(63, 0.0);
  const std::vector<double> e1 = f.ctx.eigenvector(0);
  const TrajectoryResult r = run_trajectory(zero, e1, f.params, f.op, f.ctx, gev);
  const LyapunovConfig lyap = decay_constants(f.params.gamma1, f.ctx.alpha());
  const DecayTrace tr = evaluate_decay_trace(r.record, zero, lyap, f.params, f.op, f.ctx);
  // E(0) = gamma^2 ||e1||_{alpha}^2 = gamma^2 mu1^alpha; F(0) = 0; G(0) = E(0)
  const double expected = 0.25 * std::pow(f.ctx.mu1(), f.ctx.alpha());
  CHECK(tr.energy.front() == doctest::Approx(expected).epsilon(1e-10));
  CHECK(tr.cross.front() == 0.0);
  CHECK(tr.lyapunov.front() == tr.energy.front());
}

TEST_CASE("homogeneous decay: fitted rate at least omega, uniformly in gamma") {
  const LyapunovConfig lyap = decay_constants(1.0);
  for (double gamma : {1.0, 0.25, 0.0625}) {
    ModelParams p = decay_params(gamma);
    DecayFixture f(p);
    NonlinearityEvaluator gev(f.grid2, p);
    const std::vector<double> zero(63, 0.0);
    std::vector<double> u1 = f.ctx.eigenvector(0);
    for (double& v : u1) v *= 0.5;
    const TrajectoryResult r = run_trajectory(zero, u1, p, f.op, f.ctx, gev);
    const DecayTrace tr = evaluate_decay_trace(r.record, zero, lyap, p, f.op, f.ctx);
    const DecayReport rep = verify_decay_inequality(tr, lyap);
    CHECK(rep.homogeneous);
    CHECK(rep.pass);
    CHECK(rep.margin_min >= -1e-8 * rep.energy0);
    CHECK(rep.fitted_rate >= lyap.omega);
    CHECK(tr.violations.empty());
    // G nonincreasing between consecutive samples up to scheme-order slack
    for (std::size_t i = 1; i < tr.lyapunov.size(); ++i) {
      CHECK(tr.lyapunov[i] <= tr.lyapunov[i - 1] * (1.0 + 1e-8) + 1e-12);
    }
  }
}

TEST_CASE("single-mode rate against the characteristic-root oracle") {
  ModelParams p = decay_params(0.5);
  p.dt = 2e-4;
  DecayFixture f(p);
  NonlinearityEvaluator gev(f.grid2, p);
  const std::vector<double> zero(63, 0.0);
  const std::vector<double> u1 = f.ctx.eigenvector(0);
  const TrajectoryResult r = run_trajectory(zero, u1, p, f.op, f.ctx, gev);
  const LyapunovConfig lyap = decay_constants(1.0, f.ctx.alpha());
  const DecayTrace tr = evaluate_decay_trace(r.record, zero, lyap, p, f.op, f.ctx);
  const DecayReport rep = verify_decay_inequality(tr, lyap);
  const std::complex<double> disc =
      std::sqrt(std::complex<double>(1.0 - 4.0 * p.gamma * p.gamma * f.ctx.mu1()));
  const double re_slow =
      std::min(-((-1.0 + disc) / (2.0 * p.gamma * p.gamma)).real(),
               -((-1.0 - disc) / (2.0 * p.gamma * p.gamma)).real());
  const double oracle = 2.0 * re_slow;
  CHECK(std::abs(rep.fitted_rate - oracle) <= 0.1 * oracle);
  CHECK(rep.fitted_rate >= lyap.omega);
}

TEST_CASE("trace evaluation rejects grid mismatches") {
  DecayFixture f(decay_params(0.5));
  NonlinearityEvaluator gev(f.grid2, f.params);
  const std::vector<double> zero(63, 0.0);
  const TrajectoryResult r = run_trajectory(zero, zero, f.params, f.op, f.ctx, gev);
  const LyapunovConfig lyap = decay_constants(1.0, f.ctx.alpha());
  const std::vector<double> wrong(31, 0.0);
  CHECK_THROWS_AS(evaluate_decay_trace(r.record, wrong, lyap, f.params, f.op, f.ctx),
                  ArgumentError);
}

TEST_CASE("surrogate constants: reproducible, positive, provenance recorded") {
  ModelParams p = decay_params(0.5);
  p.eps = 0.3;
  DecayFixture f(p);
  NonlinearityEvaluator gev(f.grid2, p);
  const LyapunovConfig lyap = decay_constants(1.0, f.ctx.alpha());
  const SurrogateConstants a = compute_surrogates(p, lyap, f.ctx, gev, 25, 42);
  const SurrogateConstants b = compute_surrogates(p, lyap, f.ctx, gev, 25, 42);
  CHECK(a.M > 0.0);
  CHECK(a.c3 > 0.0);
  CHECK(a.c4 > 0.0);
  CHECK(a.c3 == b.c3);  // seeded sampling is deterministic
  CHECK(a.provenance.find("surrogate") != std::string::npos);
  // M = 2 max(b/omega, (b+2)/(b omega)) = 2 max(2.5, 25) with b = 1/2, omega = 1/5
  CHECK(a.M == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("smallness conditions: branches, inversion, monotonicity") {
  ModelParams p = decay_params(0.5);
  DecayFixture f(p);
  const LyapunovConfig lyap = decay_constants(1.0, f.ctx.alpha());
  SurrogateConstants sc;
  sc.M = 8.0;
  sc.c3 = 1.5;
  sc.c4 = 2.0;
  const std::vector<double> zero(63, 0.0);

  ModelParams pz = p;
  pz.lambda = 0.0;
  const SmallnessReport r0 = smallness_conditions(zero, zero, pz, lyap, sc, f.ctx);
  CHECK(r0.global_condition);
  CHECK(std::isinf(r0.t_hat));

  // bracket = threshold/(1 - e^{-omega}) inverts to T_hat = 1 exactly
  const double threshold = p.kappa * p.kappa / (8.0 * sc.M * sc.c4 * sc.c4);
  ModelParams pl = p;
  pl.lambda = std::sqrt(threshold / (1.0 - std::exp(-lyap.omega))) / sc.c3;
  const SmallnessReport r1 = smallness_conditions(zero, zero, pl, lyap, sc, f.ctx);
  CHECK(r1.t_hat == doctest::Approx(1.0).epsilon(1e-12));

  // doubling ||u0|| strictly decreases T_hat
  std::vector<double> u0 = f.ctx.eigenvector(0);
  for (double& v : u0) v *= 0.01;
  const SmallnessReport ra = smallness_conditions(u0, zero, pl, lyap, sc, f.ctx);
  for (double& v : u0) v *= 2.0;
  const SmallnessReport rb = smallness_conditions(u0, zero, pl, lyap, sc, f.ctx);
  CHECK(rb.t_hat < ra.t_hat);
  CHECK(ra.t_hat < r1.t_hat);

  // gamma condition responds to the velocity norm
  std::vector<double> u1 = f.ctx.eigenvector(0);
  const SmallnessReport rv = smallness_conditions(zero, u1, pl, lyap, sc, f.ctx);
  CHECK(rv.gamma_lhs > 0.0);

  SurrogateConstants bad = sc;
  bad.M = 0.0;
  CHECK_THROWS_AS(smallness_conditions(zero, zero, pl, lyap, bad, f.ctx), ParameterError);
}
