#include "mems/stationary.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "mems/errors.hpp"
#include "mems/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mems {

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Undetermined: return "undetermined";
  }
  return "unknown";
}

namespace {

double l2h(const std::vector<double>& v, double h) {
  long double s = 0.0L;
  for (double vi : v) s += static_cast<long double>(vi) * vi;
  return std::sqrt(static_cast<double>(s) * h);
}

double min_gap_of(const std::vector<double>& u) {
  double g = 1.0 + u[0];
  for (double ui : u) g = std::min(g, 1.0 + ui);
  return g;
}

std::vector<double> residual_of(const PlateOperator& op, NonlinearityEvaluator& gev,
                                double lambda, const std::vector<double>& u) {
  std::vector<double> r = op.apply(u);
  if (lambda != 0.0) {
    const std::vector<double> g = gev.g(u);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += lambda * g[i];
  }
  return r;
}

// Acceptance tolerance for the steady residual.  The absolute tol_newton is
// scaled by the forcing magnitude: at larger lambda the evaluation noise of
// lambda g(U) (the one-sided trace of an elliptic solve) floors the
// attainable residual above any fixed absolute target.
double residual_tolerance(const PlateOperator& op, NonlinearityEvaluator& gev,
                          const ModelParams& p, double lambda, const std::vector<double>& u) {
  if (lambda == 0.0) return p.tol_newton;
  const std::vector<double> g = gev.g(u);
  return p.tol_newton * (1.0 + std::abs(lambda) * l2h(g, op.grid().h));
}

// Dense Jacobian of g by forward differences, one elliptic solve per column.
// Columns are independent; with the OpenMP backend they run on a worker pool
// with one evaluator per thread.
Eigen::MatrixXd g_jacobian_fd(const PlateOperator& op, NonlinearityEvaluator& gev,
                              const std::vector<double>& u, const std::vector<double>& gu) {
  const int n = op.size();
  Eigen::MatrixXd dg(n, n);
  const bool parallel = kernels::backend() == kernels::Backend::OpenMP;
#ifdef _OPENMP
  if (parallel) {
#pragma omp parallel
    {
      NonlinearityEvaluator local(gev.grid(), gev.params());
#pragma omp for schedule(static)
      for (int j = 0; j < n; ++j) {
        const double delta = 1e-6 * (1.0 + std::abs(u[j]));
        std::vector<double> up = u;
        up[j] += delta;
        const std::vector<double> gp = local.g(up);
        for (int i = 0; i < n; ++i) dg(i, j) = (gp[i] - gu[i]) / delta;
      }
    }
    return dg;
  }
#endif
  (void)parallel;
  for (int j = 0; j < n; ++j) {
    const double delta = 1e-6 * (1.0 + std::abs(u[j]));
    std::vector<double> up = u;
    up[j] += delta;
    const std::vector<double> gp = gev.g(up);
    for (int i = 0; i < n; ++i) dg(i, j) = (gp[i] - gu[i]) / delta;
  }
  return dg;
}

Eigen::MatrixXd dense_operator(const PlateOperator& op) {
  const int n = op.size();
  Eigen::MatrixXd a(n, n);
  const std::vector<double> d = op.dense();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = d[static_cast<std::size_t>(i) * n + j];
  return a;
}

Stability classify(const Eigen::MatrixXd& jac) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(jac, false);
  if (es.info() != Eigen::Success) return Stability::Undetermined;
  double min_re = es.eigenvalues()(0).real();
  double scale = 0.0;
  for (int i = 0; i < jac.rows(); ++i) {
    min_re = std::min(min_re, es.eigenvalues()(i).real());
    scale = std::max(scale, std::abs(es.eigenvalues()(i)));
  }
  const double thresh = 1e-12 * scale;
  if (min_re > thresh) return Stability::Stable;
  if (min_re < -thresh) return Stability::Unstable;
  return Stability::Undetermined;
}

}  // namespace

BranchPoint newton_steady(double lambda, const std::vector<double>& u_guess, const ModelParams& p,
                          const PlateOperator& op, NonlinearityEvaluator& gev, int max_iters) {
  const int n = op.size();
  if (static_cast<int>(u_guess.size()) != n) throw ArgumentError("newton_steady: guess size mismatch");
  const double h = op.grid().h;
  if (min_gap_of(u_guess) < p.kappa_stop) {
    throw TouchdownError("newton_steady: guess gap below kappa_stop", 0.0, min_gap_of(u_guess));
  }

  const Eigen::MatrixXd a = dense_operator(op);
  std::vector<double> u = u_guess;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::MatrixXd jac;
  bool have_jac = false;
  int jac_age = 0;
  double rnorm = 0.0;

  const double tol_accept = residual_tolerance(op, gev, p, lambda, u_guess);
  for (int it = 0; it <= max_iters; ++it) {
    const std::vector<double> r = residual_of(op, gev, lambda, u);
    rnorm = l2h(r, h);
    if (rnorm < tol_accept) {
      BranchPoint bp;
      bp.lambda = lambda;
      bp.displacement = u;
      bp.min_gap = min_gap_of(u);
      for (double ui : u) bp.sup_norm = std::max(bp.sup_norm, std::abs(ui));
      bp.residual = rnorm;
      bp.newton_iterations = it;
      Eigen::MatrixXd jfinal = a;
      if (lambda != 0.0) jfinal += lambda * g_jacobian_fd(op, gev, u, gev.g(u));
      bp.stability = classify(jfinal);
      return bp;
    }
    if (it == max_iters) break;

    if (!have_jac || jac_age >= 3) {
      jac = a;
      if (lambda != 0.0) jac += lambda * g_jacobian_fd(op, gev, u, gev.g(u));
      lu.compute(jac);
      have_jac = true;
      jac_age = 0;
    }
    ++jac_age;

    Eigen::VectorXd rv(n);
    for (int i = 0; i < n; ++i) rv(i) = r[i];
    const Eigen::VectorXd du = lu.solve(-rv);

    double s = 1.0;
    bool accepted = false;
    bool only_gap_rejections = true;
    while (s > 1e-10) {
      std::vector<double> ut(n);
      for (int i = 0; i < n; ++i) ut[i] = u[i] + s * du(i);
      if (min_gap_of(ut) >= p.kappa_stop) {
        const double rt = l2h(residual_of(op, gev, lambda, ut), h);
        only_gap_rejections = false;
        if (rt < rnorm) {
          u = std::move(ut);
          accepted = true;
          break;
        }
      }
      s *= 0.5;
    }
    if (!accepted) {
      if (jac_age > 1) {  // stale Jacobian: refresh and retry
        have_jac = false;
        continue;
      }
      if (only_gap_rejections) {
        throw TouchdownError("newton_steady: iterates pinned at the gap guard", 0.0,
                             min_gap_of(u));
      }
      throw ConvergenceError("newton_steady: line search stalled", it, rnorm);
    }
  }
  throw ConvergenceError("newton_steady: no convergence within max_iters", max_iters, rnorm);
}

namespace {

struct ArcState {
  std::vector<double> u;
  double lambda = 0.0;
};

// Bordered corrector for pseudo-arclength continuation: solve
//   R(U, lambda) = 0,
//   <U - U_pred, t_U>/n + (lambda - lambda_pred) t_lambda = 0.
bool arclength_corrector(const ModelParams& p, const PlateOperator& op,
                         NonlinearityEvaluator& gev, const Eigen::MatrixXd& a,
                         const ArcState& pred, const std::vector<double>& tu, double tl,
                         ArcState& out, int max_iters) {
  const int n = op.size();
  const double h = op.grid().h;
  ArcState cur = pred;
  if (min_gap_of(cur.u) < p.kappa_stop) return false;
  double tol_accept = p.tol_newton;
  try {
    tol_accept = residual_tolerance(op, gev, p, cur.lambda, cur.u);
  } catch (const TouchdownError&) {
    return false;
  }

  for (int it = 0; it < max_iters; ++it) {
    std::vector<double> r;
    try {
      r = residual_of(op, gev, cur.lambda, cur.u);
    } catch (const TouchdownError&) {
      return false;
    }
    double cons = (cur.lambda - pred.lambda) * tl;
    for (int i = 0; i < n; ++i) cons += (cur.u[i] - pred.u[i]) * tu[i] / n;
    const double rnorm = std::hypot(l2h(r, h), cons);
    if (rnorm < tol_accept) {
      out = cur;
      return true;
    }

    std::vector<double> gu;
    try {
      gu = gev.g(cur.u);
    } catch (const TouchdownError&) {
      return false;
    }
    Eigen::MatrixXd big(n + 1, n + 1);
    big.topLeftCorner(n, n) = a + cur.lambda * g_jacobian_fd(op, gev, cur.u, gu);
    for (int i = 0; i < n; ++i) {
      big(i, n) = gu[i];           // dR/dlambda
      big(n, i) = tu[i] / n;       // constraint row
    }
    big(n, n) = tl;
    Eigen::VectorXd rhs(n + 1);
    for (int i = 0; i < n; ++i) rhs(i) = -r[i];
    rhs(n) = -cons;
    const Eigen::VectorXd d = big.partialPivLu().solve(rhs);

    double s = 1.0;
    bool ok = false;
    while (s > 1e-8) {
      ArcState trial;
      trial.u.resize(n);
      for (int i = 0; i < n; ++i) trial.u[i] = cur.u[i] + s * d(i);
      trial.lambda = cur.lambda + s * d(n);
      if (trial.lambda > 0.0 && min_gap_of(trial.u) >= p.kappa_stop) {
        std::vector<double> rt;
        try {
          rt = residual_of(op, gev, trial.lambda, trial.u);
        } catch (const TouchdownError&) {
          s *= 0.5;
          continue;
        }
        double const_t = (trial.lambda - pred.lambda) * tl;
        for (int i = 0; i < n; ++i) const_t += (trial.u[i] - pred.u[i]) * tu[i] / n;
        if (std::hypot(l2h(rt, h), const_t) < rnorm) {
          cur = std::move(trial);
          ok = true;
          break;
        }
      }
      s *= 0.5;
    }
    if (!ok) return false;
  }
  return false;
}

}  // namespace

Branch continue_branch(const ModelParams& p, const PlateOperator& op, NonlinearityEvaluator& gev,
                       double lambda_start, double lambda_step, bool use_arclength,
                       int max_points, double gap_floor) {
  if (!(lambda_start > 0.0) || !(lambda_step > 0.0)) {
    throw ParameterError("continue_branch: lambda_start and lambda_step must be > 0");
  }
  const int n = op.size();
  Branch branch;

  // the trivial root anchors the branch
  {
    BranchPoint origin;
    origin.lambda = 0.0;
    origin.displacement.assign(n, 0.0);
    origin.stability = Stability::Stable;
    branch.points.push_back(std::move(origin));
  }

  auto arc_dist = [&](const BranchPoint& a, const BranchPoint& b) {
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = a.displacement[i] - b.displacement[i];
      s2 += d * d / n;
    }
    const double dl = a.lambda - b.lambda;
    return std::sqrt(s2 + dl * dl);
  };

  // natural continuation up to the first fold; with arclength enabled the
  // handover happens while the step is still healthy so the secant tangent
  // stays well defined
  double lambda = 0.0;
  double step = lambda_step;
  const double natural_floor = use_arclength ? std::max(1e-3 * lambda_step, 1e-8) : 1e-10;
  std::vector<double> guess(n, 0.0);
  bool fold_suspected = false;
  bool first = true;
  while (static_cast<int>(branch.points.size()) < max_points) {
    const double target = first ? lambda_start : lambda + step;
    bool ok = false;
    try {
      BranchPoint bp = newton_steady(target, guess, p, op, gev);
      bp.arclength = branch.points.back().arclength + arc_dist(bp, branch.points.back());
      guess = bp.displacement;
      lambda = target;
      first = false;
      branch.points.push_back(std::move(bp));
      ok = true;
    } catch (const ConvergenceError&) {
    } catch (const TouchdownError&) {
    }
    if (!ok) {
      step *= 0.5;
      if (step < natural_floor) {
        fold_suspected = true;
        break;
      }
    }
  }
  if (!fold_suspected && static_cast<int>(branch.points.size()) >= max_points) {
    branch.termination = "max_points";
  } else if (!use_arclength) {
    branch.termination = "step_underflow";
  }

  if (use_arclength && branch.points.size() >= 2) {
    // pseudo-arclength around the fold onto the lower branch
    const Eigen::MatrixXd a = dense_operator(op);
    double ds = std::max(1e-4, 0.25 * lambda_step);
    branch.termination = "gap_floor";
    while (static_cast<int>(branch.points.size()) < max_points) {
      // secant tangent from the most recent pair with usable separation
      const BranchPoint& p2 = branch.points.back();
      std::size_t i1 = branch.points.size() - 2;
      while (i1 > 0 && arc_dist(p2, branch.points[i1]) < 0.05 * ds) --i1;
      const BranchPoint& p1 = branch.points[i1];
      std::vector<double> tu(n);
      double tl = p2.lambda - p1.lambda;
      double tn = tl * tl;
      for (int i = 0; i < n; ++i) {
        tu[i] = p2.displacement[i] - p1.displacement[i];
        tn += tu[i] * tu[i] / n;
      }
      tn = std::sqrt(tn);
      if (tn == 0.0) {
        branch.termination = "step_underflow";
        break;
      }
      for (int i = 0; i < n; ++i) tu[i] /= tn;
      tl /= tn;

      ArcState pred;
      pred.u.resize(n);
      for (int i = 0; i < n; ++i) pred.u[i] = p2.displacement[i] + ds * tu[i];
      pred.lambda = p2.lambda + ds * tl;

      ArcState corrected;
      if (arclength_corrector(p, op, gev, a, pred, tu, tl, corrected, 25)) {
        BranchPoint bp;
        bp.lambda = corrected.lambda;
        bp.displacement = corrected.u;
        bp.min_gap = min_gap_of(corrected.u);
        for (double ui : corrected.u) bp.sup_norm = std::max(bp.sup_norm, std::abs(ui));
        {
          const std::vector<double> r = residual_of(op, gev, bp.lambda, bp.displacement);
          bp.residual = l2h(r, op.grid().h);
        }
        Eigen::MatrixXd jf = a;
        if (bp.lambda != 0.0) jf += bp.lambda * g_jacobian_fd(op, gev, bp.displacement, gev.g(bp.displacement));
        bp.stability = classify(jf);
        bp.arclength = branch.points.back().arclength + arc_dist(bp, branch.points.back());
        branch.points.push_back(std::move(bp));
        if (branch.points.back().min_gap < gap_floor) break;
        ds = std::min(ds * 1.3, lambda_step);
      } else {
        ds *= 0.5;
        if (ds < 1e-9) {
          branch.termination = "step_underflow";
          break;
        }
      }
    }
    if (static_cast<int>(branch.points.size()) >= max_points) branch.termination = "max_points";
  }

  // fold estimate: the maximum lambda reached along the branch
  double lmax = 0.0;
  int imax = -1;
  for (std::size_t i = 0; i < branch.points.size(); ++i) {
    if (branch.points[i].lambda > lmax) {
      lmax = branch.points[i].lambda;
      imax = static_cast<int>(i);
    }
  }
  if (imax >= 0 && lmax > 0.0) {
    branch.fold_lambda = lmax;
    branch.fold_index = imax;
  }
  return branch;
}

PullInInterval pull_in_bisection(const ModelParams& p, const PlateOperator& op,
                                 const FractionalNormContext& ctx, NonlinearityEvaluator& gev,
                                 double lambda_lo, double lambda_hi, double horizon, double tol) {
  if (!(lambda_hi > lambda_lo) || lambda_lo < 0.0) {
    throw ArgumentError("pull_in_bisection: need 0 <= lambda_lo < lambda_hi");
  }
  if (!(tol > 0.0)) throw ArgumentError("pull_in_bisection: tol must be > 0");
  const int n = op.size();
  const std::vector<double> zero(n, 0.0);

  auto probe = [&](double lambda) {
    ModelParams q = p;
    q.lambda = lambda;
    q.t_end = horizon;
    return run_trajectory(zero, zero, q, op, ctx, gev);
  };

  PullInInterval out;
  out.lambda_lo = lambda_lo;
  out.lambda_hi = lambda_hi;

  // lambda = 0 completes trivially (zero solution); probe otherwise
  if (lambda_lo > 0.0) {
    const TrajectoryResult lo = probe(lambda_lo);
    out.lo_status = lo.record.status;
    out.lo_final_min_gap = lo.record.min_gap_series.back();
    if (lo.record.status != Termination::Completed) {
      throw ArgumentError("pull_in_bisection: run at lambda_lo did not complete");
    }
  }
  {
    const TrajectoryResult hi = probe(lambda_hi);
    out.hi_status = hi.record.status;
    if (hi.record.status != Termination::Touchdown) {
      throw ArgumentError("pull_in_bisection: run at lambda_hi did not touch down");
    }
    out.hi_touchdown_time = hi.record.t_final;
  }

  while (out.lambda_hi - out.lambda_lo > tol) {
    const double mid = 0.5 * (out.lambda_lo + out.lambda_hi);
    const TrajectoryResult r = probe(mid);
    ++out.probes;
    if (r.record.status == Termination::Touchdown) {
      out.lambda_hi = mid;
      out.hi_touchdown_time = r.record.t_final;
    } else {
      out.lambda_lo = mid;
      out.lo_final_min_gap = r.record.min_gap_series.back();
    }
  }
  return out;
}

}  // namespace mems
