#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mems/dynamics.hpp"
#include "mems/nonlinearity.hpp"
#include "mems/plate_operator.hpp"
#include "mems/spectral.hpp"

namespace mems {

enum class Stability { Stable, Unstable, Undetermined };

const char* to_string(Stability s);

struct BranchPoint {
  double lambda = 0.0;
  std::vector<double> displacement;
  double min_gap = 1.0;
  double sup_norm = 0.0;
  double arclength = 0.0;
  Stability stability = Stability::Undetermined;
  double residual = 0.0;
  int newton_iterations = 0;
};

// Damped Newton for A_h U + lambda g(U) = 0.  The Jacobian
// A_h + lambda Dg(U) uses forward finite differences of g column by column
// (relative step 1e-6) and is refreshed every 3 Newton steps; the residual
// is measured in the discrete L2 norm.  Line-search halving
// until the residual decreases; touchdown error if iterates leave the gap
// guard, convergence error with an iteration report otherwise.
BranchPoint newton_steady(double lambda, const std::vector<double>& u_guess,
                          const ModelParams& p, const PlateOperator& op,
                          NonlinearityEvaluator& gev, int max_iters = 30);

struct Branch {
  std::vector<BranchPoint> points;
  std::optional<double> fold_lambda;  // max lambda reached (fold estimate)
  std::optional<int> fold_index;
  std::string termination;  // "step_underflow" | "gap_floor" | "max_points" | "lambda_end"
};

// Continuation in lambda from (lambda_start, U = 0).  Natural stepping with
// automatic halving; with use_arclength the branch is continued around the
// fold by pseudo-arclength steps (tangent normalized in the product norm
// with U weighted by 1/sqrt(n)) onto the second branch segment, until the
// gap floor or the point budget is hit.
Branch continue_branch(const ModelParams& p, const PlateOperator& op, NonlinearityEvaluator& gev,
                       double lambda_start, double lambda_step, bool use_arclength,
                       int max_points = 400, double gap_floor = 0.05);

struct PullInInterval {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  Termination lo_status = Termination::Completed;
  Termination hi_status = Termination::Touchdown;
  double lo_final_min_gap = 1.0;  // witness summaries for the two endpoints
  double hi_touchdown_time = 0.0;
  int probes = 0;
};

// Bisection of lambda on the touchdown-within-horizon predicate with fixed
// zero initial data.  Preconditions: the run at lambda_lo completes and the
// run at lambda_hi touches down; violations raise an argument error naming
// the failing endpoint.
PullInInterval pull_in_bisection(const ModelParams& p, const PlateOperator& op,
                                 const FractionalNormContext& ctx, NonlinearityEvaluator& gev,
                                 double lambda_lo, double lambda_hi, double horizon,
                                 double tol);

}  // namespace mems
