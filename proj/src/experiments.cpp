#include "mems/experiments.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "mems/csv.hpp"
#include "mems/decay.hpp"
#include "mems/errors.hpp"
#include "mems/kernels.hpp"
#include "mems/potential.hpp"
#include "mems/stationary.hpp"

namespace mems {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ArgumentError("cannot create output directory: " + dir);
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

json trajectory_summary(const TrajectoryRecord& rec, const Grid1D& grid) {
  json j;
  j["status"] = to_string(rec.status);
  j["t_final"] = rec.t_final;
  j["steps"] = rec.step_times.size() - 1;
  if (auto td = detect_touchdown(rec, grid)) {
    j["touchdown_time"] = td->t_c;
    j["touchdown_location"] = td->x_c;
  }
  if (rec.status == Termination::BlowupGuard) j["guard_norm"] = rec.guard_norm;
  return j;
}

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec) {
  csv::Writer w(path, {"t", "min_gap", "sup_u", "norm_H2", "g_sup", "in_S_alpha"});
  for (const TrajectorySample& s : rec.samples) {
    w.row({csv::Writer::num(s.t), csv::Writer::num(s.min_gap), csv::Writer::num(s.sup_u),
           csv::Writer::num(s.norm_h2), csv::Writer::num(s.g_sup),
           s.in_S_alpha_half ? "1" : "0"});
  }
}

void write_ledger_csv(const std::string& path, const EnergyLedger& ledger) {
  csv::Writer w(path, {"t", "Em", "Ee", "kinetic", "dissipation", "residual"});
  for (const LedgerRow& r : ledger.rows) {
    w.row({csv::Writer::num(r.t), csv::Writer::num(r.mechanical), csv::Writer::num(r.electrostatic),
           csv::Writer::num(r.kinetic), csv::Writer::num(r.dissipation),
           csv::Writer::num(r.residual)});
  }
}

// Random members of S_alpha(kappa) for empirical Lipschitz sampling; same
// low-mode construction as the c3 sampler.
std::vector<double> random_admissible(const FractionalNormContext& ctx, double kappa,
                                      std::mt19937_64& rng) {
  const int n = ctx.size();
  const int kmodes = std::min(8, n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.05, 0.6);
  std::vector<double> w(n, 0.0);
  for (int attempt = 0; attempt < 40; ++attempt) {
    std::vector<double> xi(kmodes);
    double norm2 = 0.0;
    for (int k = 0; k < kmodes; ++k) {
      xi[k] = gauss(rng) * std::pow(1.0 / (k + 1.0), 1.5);
      norm2 += xi[k] * xi[k];
    }
    double scale = unif(rng) * (1.0 / kappa) / std::sqrt(norm2);
    for (int shrink = 0; shrink < 60; ++shrink) {
      for (int i = 0; i < n; ++i) {
        double wi = 0.0;
        for (int k = 0; k < kmodes; ++k) {
          wi += scale * xi[k] * std::pow(ctx.eigenvalues()[k], -0.5 * (1.0 + ctx.alpha())) *
                ctx.eigenvector(k)[i];
        }
        w[i] = wi;
      }
      if (check_S_alpha(w, kappa, ctx).member) return w;
      scale *= 0.7;
    }
  }
  throw NumericalError("random_admissible: sampling failed to land in S_alpha(kappa)");
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  Workspace ws(cfg.model);
  NonlinearityEvaluator gev(ws.grid2, cfg.model);
  const std::vector<double> u0 = make_initial(cfg.u0, ws.grid1, ws.ctx);
  const std::vector<double> u1 = make_initial(cfg.u1, ws.grid1, ws.ctx);

  const TrajectoryResult res = run_trajectory(u0, u1, cfg.model, ws.op, ws.ctx, gev);

  write_trajectory_csv(out_dir + "/trajectory.csv", res.record);
  write_ledger_csv(out_dir + "/ledger.csv", res.ledger);

  json j;
  j["schema_version"] = 1;
  j["command"] = "simulate";
  j["run"] = trajectory_summary(res.record, ws.grid1);
  j["columns"]["trajectory"] = {"t", "min_gap", "sup_u", "norm_H2", "g_sup", "in_S_alpha"};
  j["columns"]["ledger"] = {"t", "Em", "Ee", "kinetic", "dissipation", "residual"};
  j["initial_total_energy"] = res.ledger.initial_total;
  j["config"] = cfg.serialize();
  write_json(out_dir + "/summary.json", j);

  std::cout << "simulate: status=" << to_string(res.record.status)
            << " t_final=" << format_double(res.record.t_final) << "\n";
  return 0;
}

int cmd_limit_study(const RunConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  if (cfg.gamma_list.empty()) {
    throw ParameterError("limit-study requires gamma_list (positive, descending)");
  }
  ensure_dir(out_dir);
  Workspace ws(cfg.model);
  const std::vector<double> u0 = make_initial(cfg.u0, ws.grid1, ws.ctx);
  const std::vector<double> u1 = make_initial(cfg.u1, ws.grid1, ws.ctx);

  const std::size_t nruns = cfg.gamma_list.size() + 1;  // + gamma = 0 reference
  std::vector<TrajectoryResult> runs(nruns);
  std::vector<std::string> failures(nruns);

  // sweep worker pool; members are independent and reduction is by slot
#pragma omp parallel for schedule(dynamic) if (kernels::backend() == kernels::Backend::OpenMP)
  for (std::size_t r = 0; r < nruns; ++r) {
    ModelParams p = cfg.model;
    p.gamma = (r == 0) ? 0.0 : cfg.gamma_list[r - 1];
    try {
      NonlinearityEvaluator gev(ws.grid2, p);
      runs[r] = run_trajectory(u0, u1, p, ws.op, ws.ctx, gev);
    } catch (const std::exception& e) {
      failures[r] = e.what();
    }
  }
  for (std::size_t r = 0; r < nruns; ++r) {
    const double g = (r == 0) ? 0.0 : cfg.gamma_list[r - 1];
    if (!failures[r].empty()) {
      throw NumericalError("limit study aborted at gamma=" + format_double(g) + ": " + failures[r]);
    }
    if (runs[r].record.status != Termination::Completed) {
      throw NumericalError("limit study aborted: run at gamma=" + format_double(g) +
                           " terminated early (" + to_string(runs[r].record.status) + ")");
    }
  }

  const TrajectoryResult& ref = runs[0];
  const std::size_t nsamp = ref.record.samples.size();
  const double xi = cfg.xi_or_default();
  const bool zero_data = std::all_of(u0.begin(), u0.end(), [](double v) { return v == 0.0; }) &&
                         std::all_of(u1.begin(), u1.end(), [](double v) { return v == 0.0; });

  // reference potentials at the sample times, shared by every gamma
  ModelParams pref = cfg.model;
  PotentialSolver ref_solver(ws.grid2, cfg.model.tol_linear);
  std::vector<PotentialField> ref_phi(nsamp);
  for (std::size_t s = 0; s < nsamp; ++s) {
    ref_phi[s] = solve_potential(ref_solver, ref.record.samples[s].u, pref);
  }

  struct Row {
    double gamma, err_u, err_u_xi, err_phi, err_vel;
  };
  std::vector<Row> rows(cfg.gamma_list.size());

  for (std::size_t gi = 0; gi < cfg.gamma_list.size(); ++gi) {
    const TrajectoryResult& run = runs[gi + 1];
    if (run.record.samples.size() != nsamp) {
      throw NumericalError("limit study: sample counts differ between runs");
    }
    Row row{cfg.gamma_list[gi], 0.0, 0.0, 0.0, 0.0};
    PotentialSolver solver(ws.grid2, cfg.model.tol_linear);
    double vel_int = 0.0;
    for (std::size_t s = 0; s < nsamp; ++s) {
      const TrajectorySample& a = run.record.samples[s];
      const TrajectorySample& b = ref.record.samples[s];
      std::vector<double> du(a.u.size());
      for (std::size_t i = 0; i < du.size(); ++i) du[i] = a.u[i] - b.u[i];
      row.err_u = std::max(row.err_u, ws.ctx.norm(du, 1.0));
      row.err_u_xi = std::max(row.err_u_xi, ws.ctx.norm(du, 1.0 + xi));

      const PotentialField fa = solve_potential(solver, a.u, pref);
      std::vector<double> dphi(fa.phi.size());
      for (std::size_t i = 0; i < dphi.size(); ++i) dphi[i] = fa.phi[i] - ref_phi[s].phi[i];
      row.err_phi = std::max(row.err_phi, h2_norm(ws.grid2, dphi));

      if (zero_data && cfg.model.lambda > 0.0) {
        std::vector<double> dv(a.udot.size());
        for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = a.udot[i] - b.udot[i];
        const double nv = ws.ctx.norm(dv, ws.ctx.alpha());
        // trapezoid in time for the L_2(0,T; H^{2alpha}) surrogate
        const double wt = (s == 0 || s + 1 == nsamp) ? 0.5 : 1.0;
        const double dt_s = (s + 1 < nsamp) ? ref.record.samples[s + 1].t - ref.record.samples[s].t
                                            : ref.record.samples[s].t - ref.record.samples[s - 1].t;
        vel_int += wt * nv * nv * dt_s;
      }
    }
    row.err_vel = std::sqrt(vel_int);
    rows[gi] = row;
  }

  // empirical Lipschitz constant at the (1+xi) scale for the ratio check
  std::mt19937_64 rng(cfg.seed);
  double c0_emp = 0.0;
  {
    PotentialSolver solver(ws.grid2, cfg.model.tol_linear);
    for (int pairi = 0; pairi < 24; ++pairi) {
      const std::vector<double> a = random_admissible(ws.ctx, cfg.model.kappa, rng);
      const std::vector<double> b = random_admissible(ws.ctx, cfg.model.kappa, rng);
      const LipschitzReport rep = lipschitz_probe(solver, a, b, cfg.model, ws.ctx, 1.0 + xi);
      if (!rep.identical) c0_emp = std::max(c0_emp, rep.phi_quotient);
    }
  }

  csv::Writer w(out_dir + "/limit_study.csv",
                {"gamma", "err_u", "err_u_xi", "err_potential", "err_velocity", "order_u"});
  json jrows = json::array();
  bool ratio_ok = true;
  for (std::size_t gi = 0; gi < rows.size(); ++gi) {
    double order = 0.0;
    if (gi > 0 && rows[gi].err_u > 0.0) order = std::log2(rows[gi - 1].err_u / rows[gi].err_u);
    w.row({csv::Writer::num(rows[gi].gamma), csv::Writer::num(rows[gi].err_u),
           csv::Writer::num(rows[gi].err_u_xi), csv::Writer::num(rows[gi].err_phi),
           csv::Writer::num(rows[gi].err_vel), csv::Writer::num(order)});
    const bool ok = rows[gi].err_phi <= 1.5 * c0_emp * rows[gi].err_u_xi + 1e-14;
    ratio_ok = ratio_ok && ok;
    jrows.push_back({{"gamma", rows[gi].gamma},
                     {"err_u", rows[gi].err_u},
                     {"err_u_xi", rows[gi].err_u_xi},
                     {"err_potential", rows[gi].err_phi},
                     {"err_velocity", rows[gi].err_vel},
                     {"order_u", order},
                     {"lipschitz_ratio_ok", ok}});
  }

  json j;
  j["schema_version"] = 1;
  j["command"] = "limit-study";
  j["xi"] = xi;
  j["zero_data"] = zero_data;
  j["empirical_C0"] = c0_emp;
  j["lipschitz_ratio_ok"] = ratio_ok;
  j["rows"] = jrows;
  j["config"] = cfg.serialize();
  write_json(out_dir + "/limit_summary.json", j);

  std::cout << "limit-study: " << rows.size() << " gamma values, ratio check "
            << (ratio_ok ? "ok" : "FAILED") << "\n";
  return ratio_ok ? 0 : 1;
}

namespace {

void write_branch_csv(const std::string& path, const Branch& br) {
  csv::Writer w(path, {"s", "lambda", "min_gap", "sup_norm", "stability", "residual"});
  for (const BranchPoint& bp : br.points) {
    w.row({csv::Writer::num(bp.arclength), csv::Writer::num(bp.lambda),
           csv::Writer::num(bp.min_gap), csv::Writer::num(bp.sup_norm), to_string(bp.stability),
           csv::Writer::num(bp.residual)});
  }
}

}  // namespace

int cmd_continuation(const RunConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  Workspace ws(cfg.model);
  NonlinearityEvaluator gev(ws.grid2, cfg.model);

  const Branch branch = continue_branch(cfg.model, ws.op, gev, cfg.lambda_start, cfg.lambda_step,
                                        cfg.arclength, cfg.max_branch_points);
  write_branch_csv(out_dir + "/branch.csv", branch);

  json j;
  j["schema_version"] = 1;
  j["command"] = "continuation";
  j["points"] = branch.points.size();
  j["termination"] = branch.termination;
  if (branch.fold_lambda) {
    j["lambda_s_h"] = *branch.fold_lambda;
    j["fold_index"] = *branch.fold_index;
  }
  j["columns"]["branch"] = {"s", "lambda", "min_gap", "sup_norm", "stability", "residual"};

  if (cfg.eps_compare) {
    ModelParams p0 = cfg.model;
    p0.closed_form_g = true;
    NonlinearityEvaluator gev0(ws.grid2, p0);
    const Branch b0 = continue_branch(p0, ws.op, gev0, cfg.lambda_start, cfg.lambda_step,
                                      cfg.arclength, cfg.max_branch_points);
    write_branch_csv(out_dir + "/branch_eps0.csv", b0);
    if (b0.fold_lambda) j["lambda_s_h_eps0"] = *b0.fold_lambda;
    // min-gap agreement at the shared natural lambda values
    double max_diff = 0.0;
    int shared = 0;
    for (const BranchPoint& a : branch.points) {
      for (const BranchPoint& b : b0.points) {
        if (a.lambda == b.lambda && a.lambda > 0.0) {
          max_diff = std::max(max_diff, std::abs(a.min_gap - b.min_gap));
          ++shared;
          break;
        }
      }
    }
    j["eps0_shared_points"] = shared;
    j["eps0_min_gap_max_diff"] = max_diff;
  }

  if (cfg.lambda_hi > cfg.lambda_lo && cfg.lambda_hi > 0.0) {
    const PullInInterval pi = pull_in_bisection(cfg.model, ws.op, ws.ctx, gev, cfg.lambda_lo,
                                                cfg.lambda_hi, cfg.horizon, cfg.bisect_tol);
    j["pull_in"] = {{"lambda_lo", pi.lambda_lo},
                    {"lambda_hi", pi.lambda_hi},
                    {"probes", pi.probes},
                    {"hi_touchdown_time", pi.hi_touchdown_time}};
  }

  j["config"] = cfg.serialize();
  write_json(out_dir + "/fold_summary.json", j);

  std::cout << "continuation: " << branch.points.size() << " points";
  if (branch.fold_lambda) std::cout << ", lambda_s_h=" << format_double(*branch.fold_lambda);
  std::cout << " (" << branch.termination << ")\n";
  return 0;
}

int cmd_pull_in(const RunConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  if (!(cfg.lambda_hi > cfg.lambda_lo)) {
    throw ParameterError("pull-in requires lambda_lo < lambda_hi");
  }
  ensure_dir(out_dir);
  Workspace ws(cfg.model);
  NonlinearityEvaluator gev(ws.grid2, cfg.model);
  const PullInInterval pi = pull_in_bisection(cfg.model, ws.op, ws.ctx, gev, cfg.lambda_lo,
                                              cfg.lambda_hi, cfg.horizon, cfg.bisect_tol);
  json j;
  j["schema_version"] = 1;
  j["command"] = "pull-in";
  j["lambda_lo"] = pi.lambda_lo;
  j["lambda_hi"] = pi.lambda_hi;
  j["width"] = pi.lambda_hi - pi.lambda_lo;
  j["probes"] = pi.probes;
  j["lo_status"] = to_string(pi.lo_status);
  j["hi_status"] = to_string(pi.hi_status);
  j["lo_final_min_gap"] = pi.lo_final_min_gap;
  j["hi_touchdown_time"] = pi.hi_touchdown_time;
  j["horizon"] = cfg.horizon;
  j["config"] = cfg.serialize();
  write_json(out_dir + "/pull_in.json", j);
  std::cout << "pull-in: lambda* in [" << format_double(pi.lambda_lo) << ", "
            << format_double(pi.lambda_hi) << "] after " << pi.probes << " probes\n";
  return 0;
}

int cmd_decay(const RunConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  Workspace ws(cfg.model);
  NonlinearityEvaluator gev(ws.grid2, cfg.model);
  const std::vector<double> u0 = make_initial(cfg.u0, ws.grid1, ws.ctx);
  const std::vector<double> u1 = make_initial(cfg.u1, ws.grid1, ws.ctx);

  const LyapunovConfig lyap = decay_constants(cfg.model.gamma1, ws.ctx.alpha());
  const TrajectoryResult res = run_trajectory(u0, u1, cfg.model, ws.op, ws.ctx, gev);
  const DecayTrace trace = evaluate_decay_trace(res.record, u0, lyap, cfg.model, ws.op, ws.ctx);
  const DecayReport rep = verify_decay_inequality(trace, lyap);
  const SurrogateConstants sc =
      compute_surrogates(cfg.model, lyap, ws.ctx, gev, cfg.c3_samples, cfg.seed);
  const SmallnessReport sm = smallness_conditions(u0, u1, cfg.model, lyap, sc, ws.ctx);

  json j;
  j["schema_version"] = 1;
  j["command"] = "decay";
  j["constants"] = {{"gamma1", lyap.gamma1}, {"c0", lyap.c0},   {"c1", lyap.c1},
                    {"c2", lyap.c2},         {"b", lyap.b},     {"omega", lyap.omega}};
  j["trace"] = {{"samples", trace.t.size()},
                {"violations", trace.violations.size()},
                {"energy0", rep.energy0}};
  j["gronwall"] = {{"margin_min", rep.margin_min},
                   {"fitted_rate", rep.fitted_rate},
                   {"homogeneous", rep.homogeneous},
                   {"pass", rep.pass}};
  j["surrogates"] = {{"M", sc.M},
                     {"c3", sc.c3},
                     {"c4", sc.c4},
                     {"c3_samples", sc.c3_samples},
                     {"seed", sc.seed},
                     {"provenance", sc.provenance}};
  json jt;
  jt["gamma_condition"] = sm.gamma_condition;
  jt["global_condition"] = sm.global_condition;
  jt["threshold"] = sm.threshold;
  jt["bracket"] = sm.bracket;
  if (std::isinf(sm.t_hat))
    jt["t_hat"] = "inf";
  else
    jt["t_hat"] = sm.t_hat;
  j["smallness"] = jt;
  j["run"] = trajectory_summary(res.record, ws.grid1);
  j["config"] = cfg.serialize();
  write_json(out_dir + "/decay_report.json", j);

  std::cout << "decay: b=" << format_double(lyap.b) << " omega=" << format_double(lyap.omega)
            << " fitted_rate=" << format_double(rep.fitted_rate)
            << " margin=" << format_double(rep.margin_min) << " => "
            << (rep.pass && trace.violations.empty() ? "pass" : "FAIL") << "\n";
  return (rep.pass && trace.violations.empty()) ? 0 : 1;
}

}  // namespace mems
