#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "mems/nonlinearity.hpp"
#include "mems/plate_operator.hpp"
#include "mems/spectral.hpp"

namespace mems {

enum class Termination { Completed, Touchdown, BlowupGuard };

const char* to_string(Termination t);

struct LedgerRow {
  double t = 0.0;
  double mechanical = 0.0;   // (1/2) <A_h u, u>_h
  double electrostatic = 0.0;
  double kinetic = 0.0;      // (gamma^2/2) ||u_t||^2
  double dissipation = 0.0;  // running sum of dt ||u_t||^2
  double residual = 0.0;     // defect of the energy equality
};

struct EnergyLedger {
  std::vector<LedgerRow> rows;
  double initial_total = 0.0;  // E(u0) + (gamma^2/2)||u1||^2
};

struct TrajectorySample {
  double t = 0.0;
  std::vector<double> u;
  std::vector<double> udot;
  std::vector<double> g;  // empty when lambda = 0
  double min_gap = 1.0;
  double sup_u = 0.0;
  double norm_h2 = 0.0;  // ||u||_1 (A_h^{1/2} scale)
  double g_sup = 0.0;
  bool in_S_alpha_half = true;
};

struct TrajectoryRecord {
  std::vector<TrajectorySample> samples;
  std::vector<double> step_times;      // per step
  std::vector<double> min_gap_series;  // per step
  Termination status = Termination::Completed;
  double t_final = 0.0;
  double guard_norm = 0.0;  // ||u||_{1+alpha} that tripped the blowup guard
  std::vector<double> final_u;
};

struct TouchdownEstimate {
  double t_c = 0.0;
  double x_c = 0.0;
};

// Linear extrapolation of the per-step min-gap series through the last two
// entries to gap = 0; absent for runs that did not hit the touchdown guard.
std::optional<TouchdownEstimate> detect_touchdown(const TrajectoryRecord& record,
                                                  const Grid1D& grid);

// One implicit-midpoint step of u' = v, gamma^2 v' = -v - A_h u - lambda g,
// with g frozen at the half-step predictor u + (dt/2) v.  The midpoint
// update is solved for v_{n+1/2} from
//   [(2 gamma^2 + dt) I + (dt^2/2) A_h] v_mid = 2 gamma^2 v - dt (A_h u + lambda g)
// and the banded factor is cached across steps.  The scheme stays stable as
// gamma -> 0 at fixed dt (it degenerates into a semi-implicit midpoint step
// of the parabolic flow), which the singular-limit sweeps rely on.
class WaveIntegrator {
public:
  WaveIntegrator(const ModelParams& p, const PlateOperator& op, NonlinearityEvaluator& gev);
  void step(PlateState& state);

private:
  const ModelParams& params_;
  const PlateOperator& op_;
  NonlinearityEvaluator& gev_;
  std::shared_ptr<const BandedSPD> factor_;
};

// Semi-implicit Euler for the parabolic flow (gamma = 0):
//   (I + dt A_h) u_{n+1} = u_n - dt lambda g(u_n).
class ParabolicIntegrator {
public:
  ParabolicIntegrator(const ModelParams& p, const PlateOperator& op, NonlinearityEvaluator& gev);
  void step(PlateState& state);

private:
  const ModelParams& params_;
  const PlateOperator& op_;
  NonlinearityEvaluator& gev_;
  std::shared_ptr<const BandedSPD> factor_;
};

struct TrajectoryResult {
  TrajectoryRecord record;
  EnergyLedger ledger;
};

// Integrate from (u0, u1) to t_end or early termination.  u0 must lie in
// S_alpha(kappa).  Ledger and snapshots are taken every `stride` steps; the
// dissipation integral is accumulated every step by the trapezoidal rule in
// time, which leaves an O(dt^2) defect in the recorded energy equality.
TrajectoryResult run_trajectory(const std::vector<double>& u0, const std::vector<double>& u1,
                                const ModelParams& p, const PlateOperator& op,
                                const FractionalNormContext& ctx, NonlinearityEvaluator& gev);

}  // namespace mems
