#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mems/dynamics.hpp"
#include "mems/nonlinearity.hpp"
#include "mems/spectral.hpp"

namespace mems {

// Constants of the perturbed-energy construction for the shifted variable
// v = u - u0 solving gamma^2 v'' + v' + A_h v = f:
//   b = min{ 2/(2 gamma_1^2 + c_1 + 1), 1/(2 c_1), 1/(gamma_1 c_1) },
//   omega = b / (2 + c_1 b gamma_1),
// with the spectral calibration c_0 = c_1 = c_2 = 1.
struct LyapunovConfig {
  double gamma1 = 1.0;
  double c0 = 1.0, c1 = 1.0, c2 = 1.0;
  double b = 0.5;
  double omega = 0.2;
  double alpha = 0.125;
};

LyapunovConfig decay_constants(double gamma1, double alpha = 0.125);

struct SandwichViolation {
  double t = 0.0;
  std::string which;
  double amount = 0.0;  // positive excess beyond the inequality
};

// E(t) = ||A^{1/2} v||_alpha^2 + gamma^2 ||v_t||_alpha^2 on the H^{2alpha}
// base scale, F(t) = gamma <v, v_t>_alpha, G = E + b gamma F, and the norm
// series of the forcing f = -lambda g(u) - A_h u0.
struct DecayTrace {
  std::vector<double> t;
  std::vector<double> energy;   // E
  std::vector<double> cross;    // F
  std::vector<double> lyapunov; // G
  std::vector<double> f_norm;   // ||f||_alpha
  std::vector<SandwichViolation> violations;  // sandwich defects beyond 1e-12 relative
};

DecayTrace evaluate_decay_trace(const TrajectoryRecord& trajectory, const std::vector<double>& u0,
                                const LyapunovConfig& config, const ModelParams& p,
                                const PlateOperator& op, const FractionalNormContext& ctx);

// Integrated (Gronwall) form of the decay inequality:
//   E(t) <= (b/omega) e^{-omega t} E(0)
//           + ((b+2)/(b omega)) (1 - e^{-omega t}) sup_{s<=t} ||f(s)||^2.
// Checked at every sample; `fitted_rate` is the least-squares exponential
// rate of E for the homogeneous case.
struct DecayReport {
  double margin_min = 0.0;     // min over t of envelope - E
  double fitted_rate = 0.0;
  bool homogeneous = false;    // sup ||f|| numerically zero
  bool pass = false;           // margin_min >= -1e-8 E(0)
  double energy0 = 0.0;
  std::size_t samples = 0;
};

DecayReport verify_decay_inequality(const DecayTrace& trace, const LyapunovConfig& config);

// Nonconstructive constants of the minimal-existence-time analysis, pinned
// by computable surrogates:
//   c4  — discrete sup-norm embedding constant over the eigenbasis,
//   c3  — empirical sup of ||g(w)||_alpha over random samples of S_alpha(kappa/2)
//         (a lower bound of the true supremum; seeded and reproducible),
//   M   — 2 max{ b/omega, (b+2)/(b omega) } from the Gronwall constants.
struct SurrogateConstants {
  double M = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  int c3_samples = 0;
  std::uint64_t seed = 0;
  std::string provenance;
};

SurrogateConstants compute_surrogates(const ModelParams& p, const LyapunovConfig& config,
                                      const FractionalNormContext& ctx, NonlinearityEvaluator& gev,
                                      int c3_samples, std::uint64_t seed);

// Smallness conditions and the minimal-existence-time estimate:
//   gamma-condition:  gamma^2 ||u1||_alpha^2 < kappa^2/(8 M c4^2)
//   global-condition: lambda^2 c3^2 + ||u0||_{2+alpha}^2 < kappa^2/(8 M c4^2)
//   T_hat = -(1/omega) log(1 - kappa^2/(8 M c4^2 B)), B the bracket above,
// with T_hat = infinity on the global branch.
struct SmallnessReport {
  bool gamma_condition = false;
  bool global_condition = false;
  double t_hat = 0.0;  // +inf when global
  double threshold = 0.0;  // kappa^2/(8 M c4^2)
  double gamma_lhs = 0.0;
  double bracket = 0.0;  // lambda^2 c3^2 + ||u0||_{2+alpha}^2
};

SmallnessReport smallness_conditions(const std::vector<double>& u0, const std::vector<double>& u1,
                                     const ModelParams& p, const LyapunovConfig& config,
                                     const SurrogateConstants& sc,
                                     const FractionalNormContext& ctx);

}  // namespace mems
