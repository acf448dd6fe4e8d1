#include "mems/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mems/errors.hpp"

namespace mems {

LyapunovConfig decay_constants(double gamma1, double alpha) {
  if (!(gamma1 > 0.0)) throw ParameterError("decay_constants: gamma1 must be > 0");
  LyapunovConfig c;
  c.gamma1 = gamma1;
  c.alpha = alpha;
  const double c1 = c.c1;
  c.b = std::min({2.0 / (2.0 * gamma1 * gamma1 + c1 + 1.0), 1.0 / (2.0 * c1), 1.0 / (gamma1 * c1)});
  c.omega = c.b / (2.0 + c1 * c.b * gamma1);
  return c;
}

DecayTrace evaluate_decay_trace(const TrajectoryRecord& trajectory, const std::vector<double>& u0,
                                const LyapunovConfig& config, const ModelParams& p,
                                const PlateOperator& op, const FractionalNormContext& ctx) {
  if (static_cast<int>(u0.size()) != op.size() || ctx.size() != op.size()) {
    throw ArgumentError("evaluate_decay_trace: grid mismatch");
  }
  const double alpha = ctx.alpha();
  const double g2 = p.gamma * p.gamma;
  const std::vector<double> au0 = op.apply(u0);

  DecayTrace tr;
  const std::size_t ns = trajectory.samples.size();
  tr.t.reserve(ns);
  for (const TrajectorySample& s : trajectory.samples) {
    std::vector<double> v(u0.size()), f(u0.size());
    for (std::size_t i = 0; i < u0.size(); ++i) {
      v[i] = s.u[i] - u0[i];
      f[i] = -au0[i];
      if (!s.g.empty()) f[i] -= p.lambda * s.g[i];
    }
    const double nv1a = ctx.norm(v, 1.0 + alpha);
    const double nvdot = s.udot.empty() ? 0.0 : ctx.norm(s.udot, alpha);
    const double E = nv1a * nv1a + g2 * nvdot * nvdot;
    const double F = s.udot.empty() ? 0.0 : p.gamma * ctx.inner(v, s.udot, alpha);
    const double G = E + config.b * p.gamma * F;

    tr.t.push_back(s.t);
    tr.energy.push_back(E);
    tr.cross.push_back(F);
    tr.lyapunov.push_back(G);
    tr.f_norm.push_back(ctx.norm(f, alpha));

    // |F| <= (c1/2) E and (1/2) E <= G <= (1 + c1 b gamma1 / 2) E,
    // pointwise with 1e-12 relative tolerance
    const double tol = 1e-12 * std::max(E, 1e-300);
    if (std::abs(F) > 0.5 * config.c1 * E + tol) {
      tr.violations.push_back({s.t, "F_bound", std::abs(F) - 0.5 * config.c1 * E});
    }
    if (G < 0.5 * E - tol) {
      tr.violations.push_back({s.t, "G_lower", 0.5 * E - G});
    }
    const double upper = (1.0 + 0.5 * config.c1 * config.b * config.gamma1) * E;
    if (G > upper + tol) {
      tr.violations.push_back({s.t, "G_upper", G - upper});
    }
  }
  return tr;
}

DecayReport verify_decay_inequality(const DecayTrace& trace, const LyapunovConfig& config) {
  DecayReport rep;
  rep.samples = trace.t.size();
  if (trace.t.empty()) return rep;
  rep.energy0 = trace.energy.front();
  const double b = config.b;
  const double w = config.omega;

  double supf2 = 0.0;
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    supf2 = std::max(supf2, trace.f_norm[i] * trace.f_norm[i]);
    const double envelope = (b / w) * std::exp(-w * trace.t[i]) * rep.energy0 +
                            ((b + 2.0) / (b * w)) * (1.0 - std::exp(-w * trace.t[i])) * supf2;
    margin = std::min(margin, envelope - trace.energy[i]);
  }
  rep.margin_min = margin;
  rep.homogeneous = supf2 <= 1e-28 * std::max(rep.energy0, 1.0);
  rep.pass = margin >= -1e-8 * rep.energy0;

  // least-squares exponential rate of E over the usable window
  const double floor = std::max(1e-14 * rep.energy0, 1e-300);
  double st = 0, se = 0, stt = 0, ste = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    if (trace.energy[i] > floor) {
      const double le = std::log(trace.energy[i]);
      st += trace.t[i];
      se += le;
      stt += trace.t[i] * trace.t[i];
      ste += trace.t[i] * le;
      ++m;
    }
  }
  if (m >= 2) {
    const double denom = m * stt - st * st;
    if (denom > 0.0) rep.fitted_rate = -(m * ste - st * se) / denom;
  }
  return rep;
}

SurrogateConstants compute_surrogates(const ModelParams& p, const LyapunovConfig& config,
                                      const FractionalNormContext& ctx, NonlinearityEvaluator& gev,
                                      int c3_samples, std::uint64_t seed) {
  SurrogateConstants sc;
  sc.c4 = ctx.embedding_constant_sup();
  sc.M = 2.0 * std::max(config.b / config.omega, (config.b + 2.0) / (config.b * config.omega));
  sc.c3_samples = c3_samples;
  sc.seed = seed;

  // Random smooth members of S_alpha(kappa/2): low-mode expansions scaled to
  // a random fraction of the norm bound 2/kappa, shrunk if the gap margin
  // fails.  This samples a lower bound of the true supremum c3(kappa).
  const double alpha = ctx.alpha();
  const int n = ctx.size();
  const int kmodes = std::min(8, n);
  std::vector<std::vector<double>> basis(kmodes);
  for (int k = 0; k < kmodes; ++k) basis[k] = ctx.eigenvector(k);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.1, 0.9);

  double c3 = 0.0;
  for (int s = 0; s < c3_samples; ++s) {
    std::vector<double> xi(kmodes);
    double norm2 = 0.0;
    for (int k = 0; k < kmodes; ++k) {
      // coefficient of e_k contributes xi_k^2 to ||w||_{1+alpha}^2
      xi[k] = gauss(rng) * std::pow(1.0 / (k + 1.0), 1.5);
      norm2 += xi[k] * xi[k];
    }
    const double target = unif(rng) * (2.0 / p.kappa);
    double scale = target / std::sqrt(norm2);
    std::vector<double> w(n);
    for (int shrink = 0; shrink < 80; ++shrink) {
      for (int i = 0; i < n; ++i) {
        double wi = 0.0;
        for (int k = 0; k < kmodes; ++k) {
          wi += scale * xi[k] * std::pow(ctx.eigenvalues()[k], -0.5 * (1.0 + alpha)) * basis[k][i];
        }
        w[i] = wi;
      }
      if (check_S_alpha(w, 0.5 * p.kappa, ctx).member) break;
      scale *= 0.7;
    }
    if (!check_S_alpha(w, 0.5 * p.kappa, ctx).member) continue;
    const std::vector<double> g = gev.g(w);
    c3 = std::max(c3, ctx.norm(g, alpha));
  }
  sc.c3 = c3;
  sc.provenance =
      "surrogates: c4 = eigenbasis sup-norm embedding constant; c3 = sampled lower bound of "
      "sup ||g||_alpha over S_alpha(kappa/2); M = 2 max(b/omega, (b+2)/(b omega))";
  return sc;
}

SmallnessReport smallness_conditions(const std::vector<double>& u0, const std::vector<double>& u1,
                                     const ModelParams& p, const LyapunovConfig& config,
                                     const SurrogateConstants& sc,
                                     const FractionalNormContext& ctx) {
  if (!(sc.M > 0.0) || !(sc.c4 > 0.0) || sc.c3 < 0.0) {
    throw ParameterError("smallness_conditions: surrogate constants must be positive");
  }
  SmallnessReport rep;
  rep.threshold = p.kappa * p.kappa / (8.0 * sc.M * sc.c4 * sc.c4);

  const double nu1 = ctx.norm(u1, ctx.alpha());
  rep.gamma_lhs = p.gamma * p.gamma * nu1 * nu1;
  rep.gamma_condition = rep.gamma_lhs < rep.threshold;

  const double nu0 = ctx.norm(u0, 2.0 + ctx.alpha());  // H^{4+2alpha} scale
  rep.bracket = p.lambda * p.lambda * sc.c3 * sc.c3 + nu0 * nu0;
  rep.global_condition = rep.bracket < rep.threshold;

  if (rep.bracket <= 0.0 || rep.threshold / rep.bracket >= 1.0) {
    rep.t_hat = std::numeric_limits<double>::infinity();
  } else {
    rep.t_hat = -std::log(1.0 - rep.threshold / rep.bracket) / config.omega;
  }
  return rep;
}

}  // namespace mems
