#include "mems/dynamics.hpp"

#include <cmath>
#include <cstdio>

#include "mems/errors.hpp"

namespace mems {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Completed: return "completed";
    case Termination::Touchdown: return "touchdown";
    case Termination::BlowupGuard: return "blowup_guard";
  }
  return "unknown";
}

namespace {

double l2h_sq(const std::vector<double>& v, double h) {
  long double s = 0.0L;
  for (double vi : v) s += static_cast<long double>(vi) * vi;
  return static_cast<double>(s) * h;
}

double min_gap_of(const std::vector<double>& u) {
  double g = 1.0 + u[0];
  for (double ui : u) g = std::min(g, 1.0 + ui);
  return g;
}

}  // namespace

WaveIntegrator::WaveIntegrator(const ModelParams& p, const PlateOperator& op,
                               NonlinearityEvaluator& gev)
    : params_(p), op_(op), gev_(gev) {
  if (!(p.gamma > 0.0)) throw ParameterError("WaveIntegrator requires gamma > 0");
  const double dt = p.dt;
  factor_ = op_.factor_shifted(2.0 * p.gamma * p.gamma + dt, 0.5 * dt * dt);
}

void WaveIntegrator::step(PlateState& state) {
  const int n = op_.size();
  const double dt = params_.dt;
  const double g2 = params_.gamma * params_.gamma;

  std::vector<double> rhs = op_.apply(state.u);
  if (params_.lambda != 0.0) {
    std::vector<double> pred(n);
    for (int i = 0; i < n; ++i) pred[i] = state.u[i] + 0.5 * dt * state.v[i];
    const double gap = min_gap_of(pred);
    if (gap < params_.kappa_stop) {
      throw TouchdownError("wave step: predictor gap below kappa_stop", state.t + 0.5 * dt, gap);
    }
    const std::vector<double> g = gev_.g(pred);
    for (int i = 0; i < n; ++i) rhs[i] += params_.lambda * g[i];
  }
  for (int i = 0; i < n; ++i) rhs[i] = 2.0 * g2 * state.v[i] - dt * rhs[i];
  const std::vector<double> vmid = factor_->solve(rhs);
  for (int i = 0; i < n; ++i) {
    state.u[i] += dt * vmid[i];
    state.v[i] = 2.0 * vmid[i] - state.v[i];
  }
  state.t += dt;
}

ParabolicIntegrator::ParabolicIntegrator(const ModelParams& p, const PlateOperator& op,
                                         NonlinearityEvaluator& gev)
    : params_(p), op_(op), gev_(gev) {
  factor_ = op_.factor_shifted(1.0, p.dt);
}

void ParabolicIntegrator::step(PlateState& state) {
  const int n = op_.size();
  const double dt = params_.dt;
  std::vector<double> rhs = state.u;
  if (params_.lambda != 0.0) {
    const std::vector<double> g = gev_.g(state.u);
    for (int i = 0; i < n; ++i) rhs[i] -= dt * params_.lambda * g[i];
  }
  const std::vector<double> unew = factor_->solve(rhs);
  for (int i = 0; i < n; ++i) {
    state.v[i] = (unew[i] - state.u[i]) / dt;  // backward-difference velocity
    state.u[i] = unew[i];
  }
  state.t += dt;
}

std::optional<TouchdownEstimate> detect_touchdown(const TrajectoryRecord& record,
                                                  const Grid1D& grid) {
  if (record.status != Termination::Touchdown) return std::nullopt;
  const std::size_t n = record.min_gap_series.size();
  TouchdownEstimate est;
  if (n >= 2) {
    const double g1 = record.min_gap_series[n - 2];
    const double g2 = record.min_gap_series[n - 1];
    const double t1 = record.step_times[n - 2];
    const double t2 = record.step_times[n - 1];
    est.t_c = (g1 > g2) ? t2 + g2 * (t2 - t1) / (g1 - g2) : t2;
  } else {
    est.t_c = record.t_final;
  }
  int argmin = 0;
  for (std::size_t i = 1; i < record.final_u.size(); ++i) {
    if (record.final_u[i] < record.final_u[argmin]) argmin = static_cast<int>(i);
  }
  est.x_c = grid.x[argmin];
  return est;
}

TrajectoryResult run_trajectory(const std::vector<double>& u0, const std::vector<double>& u1,
                                const ModelParams& p, const PlateOperator& op,
                                const FractionalNormContext& ctx, NonlinearityEvaluator& gev) {
  p.validate();
  const int n = op.size();
  if (static_cast<int>(u0.size()) != n || static_cast<int>(u1.size()) != n) {
    throw ArgumentError("run_trajectory: initial data size mismatch");
  }
  const SAlphaReport adm = check_S_alpha(u0, p.kappa, ctx);
  if (!adm.member) {
    throw AdmissibilityError("run_trajectory: u0 not in S_alpha(kappa)");
  }
  if (p.lambda > 0.0) {
    // heuristic step bound for the explicitly treated nonlinearity
    const double dt_guard = 0.25 * adm.gap_value * adm.gap_value / p.lambda;
    if (p.dt > dt_guard) {
      std::fprintf(stderr,
                   "run_trajectory: dt = %g exceeds the heuristic guard 0.25 min_gap^2 / lambda "
                   "= %g; the explicit nonlinearity may destabilize the step\n",
                   p.dt, dt_guard);
    }
  }

  const double h = op.grid().h;
  const double g2 = p.gamma * p.gamma;
  const bool wave = p.gamma > 0.0;

  PlateState state{u0, u1, 0.0};
  if (!wave) state.v.assign(n, 0.0);  // parabolic flow ignores u1

  TrajectoryResult out;
  TrajectoryRecord& rec = out.record;
  EnergyLedger& ledger = out.ledger;

  NonlinearityEvaluator* ge = &gev;
  std::unique_ptr<WaveIntegrator> wstep;
  std::unique_ptr<ParabolicIntegrator> pstep;
  if (wave)
    wstep = std::make_unique<WaveIntegrator>(p, op, *ge);
  else
    pstep = std::make_unique<ParabolicIntegrator>(p, op, *ge);

  double dissipation = 0.0;

  auto record_sample = [&](const PlateState& s) {
    TrajectorySample smp;
    smp.t = s.t;
    smp.u = s.u;
    smp.min_gap = s.min_gap();
    smp.sup_u = s.sup_u();
    smp.norm_h2 = ctx.norm(s.u, 1.0);
    smp.in_S_alpha_half = check_S_alpha(s.u, 0.5 * p.kappa, ctx).member;

    LedgerRow row;
    row.t = s.t;
    row.mechanical = 0.5 * op.quadratic_form(s.u);
    row.kinetic = 0.5 * g2 * l2h_sq(s.v, h);
    row.dissipation = dissipation;
    if (p.lambda != 0.0) {
      const NonlinearityEvaluator::Sample gs = ge->sample(s.u);
      smp.g = gs.g;
      for (double gi : gs.g) smp.g_sup = std::max(smp.g_sup, std::abs(gi));
      row.electrostatic = gs.energy;
    }
    if (wave) {
      smp.udot = s.v;
    } else {
      // discrete-consistent velocity from the right-hand side
      smp.udot = op.apply(s.u);
      for (int i = 0; i < n; ++i) {
        smp.udot[i] = -smp.udot[i];
        if (!smp.g.empty()) smp.udot[i] -= p.lambda * smp.g[i];
      }
    }
    const double total = row.mechanical - p.lambda * row.electrostatic + row.kinetic + row.dissipation;
    if (ledger.rows.empty()) {
      ledger.initial_total = total;
    }
    row.residual = total - ledger.initial_total;
    rec.samples.push_back(std::move(smp));
    ledger.rows.push_back(row);
  };

  record_sample(state);
  rec.step_times.push_back(0.0);
  rec.min_gap_series.push_back(state.min_gap());

  const long long nsteps = std::llround(p.t_end / p.dt);
  const double norm_guard = 2.0 / p.kappa;

  for (long long k = 0; k < nsteps; ++k) {
    const double vprev2 = l2h_sq(state.v, h);
    try {
      if (wave)
        wstep->step(state);
      else
        pstep->step(state);
    } catch (const TouchdownError&) {
      rec.status = Termination::Touchdown;
      break;
    }
    if (wave) {
      dissipation += 0.5 * p.dt * (vprev2 + l2h_sq(state.v, h));
    } else {
      dissipation += p.dt * l2h_sq(state.v, h);
    }
    rec.step_times.push_back(state.t);
    rec.min_gap_series.push_back(state.min_gap());

    if (state.min_gap() < p.kappa_stop) {
      rec.status = Termination::Touchdown;
      break;
    }
    const double norm1a = ctx.norm(state.u, 1.0 + ctx.alpha());
    if (norm1a > norm_guard) {
      rec.status = Termination::BlowupGuard;
      rec.guard_norm = norm1a;
      break;
    }
    if ((k + 1) % p.stride == 0 || k + 1 == nsteps) record_sample(state);
  }

  rec.t_final = state.t;
  rec.final_u = state.u;
  return out;
}

}  // namespace mems
