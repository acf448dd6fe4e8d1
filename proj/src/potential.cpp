#include "mems/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mems/errors.hpp"
#include "mems/kernels.hpp"

namespace mems {

PlateDerivatives plate_derivatives(const Grid1D& grid, const std::vector<double>& u) {
  const int n = grid.n_interior;
  if (static_cast<int>(u.size()) != n) throw ArgumentError("plate_derivatives: size mismatch");
  const double h = grid.h;
  PlateDerivatives d;
  d.ux.resize(n);
  d.uxx.resize(n);
  auto at = [&](int i) { return (i >= 0 && i < n) ? u[i] : 0.0; };  // walls carry u = 0
  for (int i = 0; i < n; ++i) {
    d.ux[i] = (at(i + 1) - at(i - 1)) / (2.0 * h);
    d.uxx[i] = (at(i + 1) - 2.0 * u[i] + at(i - 1)) / (h * h);
  }
  return d;
}

TransformedCoefficients derive_transformed_pde(const Grid2D& grid, const std::vector<double>& u,
                                               double eps, double kappa_stop) {
  if (static_cast<int>(u.size()) != grid.gx.n_interior) {
    throw ArgumentError("derive_transformed_pde: u size mismatch");
  }
  double gap = 1.0 + u[0];
  for (double ui : u) gap = std::min(gap, 1.0 + ui);
  if (gap < kappa_stop) {
    throw TouchdownError("derive_transformed_pde: gap below kappa_stop", 0.0, gap);
  }
  const PlateDerivatives d = plate_derivatives(grid.gx, u);
  TransformedCoefficients co;
  kernels::assemble_coefficients(grid, u, d.ux, d.uxx, eps, co);
  return co;
}

PotentialSolver::PotentialSolver(const Grid2D& grid, double tol_linear)
    : grid_(grid), tol_linear_(tol_linear) {
  const int n = grid_.gx.n_interior;
  const int m = grid_.m_interior;
  mat_.resize(n * m, n * m);
}

PotentialField PotentialSolver::solve(const TransformedCoefficients& co) {
  std::vector<double> dirichlet(grid_.total_nodes());
  for (int j = 0; j <= grid_.m_interior + 1; ++j) {
    const double eta = grid_.eta_of(j);
    for (int i = 0; i <= grid_.gx.n_interior + 1; ++i) dirichlet[grid_.node(i, j)] = eta;
  }
  return run(co, {}, dirichlet);
}

PotentialField PotentialSolver::solve_forced(const TransformedCoefficients& co,
                                             const std::vector<double>& forcing,
                                             const std::vector<double>& dirichlet_full) {
  return run(co, forcing, dirichlet_full);
}

PotentialField PotentialSolver::run(const TransformedCoefficients& co,
                                    const std::vector<double>& forcing,
                                    const std::vector<double>& dirichlet_full) {
  const int n = grid_.gx.n_interior;
  const int m = grid_.m_interior;
  if (co.n != n || co.m != m) throw ArgumentError("PotentialSolver: coefficient grid mismatch");
  const double h = grid_.gx.h;
  const double k = grid_.k;
  const double ih2 = 1.0 / (h * h);
  const double ik2 = 1.0 / (k * k);
  const double ihk4 = 1.0 / (4.0 * h * k);
  const double ik_half = 1.0 / (2.0 * k);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(9) * n * m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n * m);
  double row_scale_max = 0.0;

  auto unknown = [&](int i, int j) { return (j - 1) * n + (i - 1); };
  auto interior = [&](int i, int j) { return i >= 1 && i <= n && j >= 1 && j <= m; };

  for (int j = 1; j <= m; ++j) {
    for (int i = 1; i <= n; ++i) {
      const int p = unknown(i, j);
      const std::size_t id = co.idx(i - 1, j - 1);
      const double a = co.a[id], b = co.b[id], c = co.c[id], d = co.d[id];
      double scale = 0.0;
      // all nine entries are inserted even when zero, so the sparsity
      // pattern is a fixed function of the grid and the one-time
      // analyzePattern stays valid across coefficient sets
      auto add = [&](int ii, int jj, double w) {
        scale += std::abs(w);
        if (interior(ii, jj))
          trips.emplace_back(p, unknown(ii, jj), w);
        else if (w != 0.0)
          rhs(p) -= w * dirichlet_full[grid_.node(ii, jj)];
      };
      add(i, j, -2.0 * a * ih2 - 2.0 * c * ik2);
      add(i - 1, j, a * ih2);
      add(i + 1, j, a * ih2);
      add(i, j - 1, c * ik2 - d * ik_half);
      add(i, j + 1, c * ik2 + d * ik_half);
      add(i + 1, j + 1, b * ihk4);
      add(i - 1, j - 1, b * ihk4);
      add(i + 1, j - 1, -b * ihk4);
      add(i - 1, j + 1, -b * ihk4);
      if (!forcing.empty()) rhs(p) += forcing[id];
      row_scale_max = std::max(row_scale_max, scale);
    }
  }

  mat_.setFromTriplets(trips.begin(), trips.end());
  if (!pattern_ready_) {
    lu_.analyzePattern(mat_);
    pattern_ready_ = true;
  }
  lu_.factorize(mat_);
  if (lu_.info() != Eigen::Success) {
    throw NumericalError("PotentialSolver: sparse LU factorization failed");
  }
  Eigen::VectorXd sol = lu_.solve(rhs);
  if (lu_.info() != Eigen::Success) {
    throw NumericalError("PotentialSolver: sparse LU solve failed");
  }

  PotentialField field;
  field.phi = dirichlet_full;
  for (int j = 1; j <= m; ++j)
    for (int i = 1; i <= n; ++i) field.phi[grid_.node(i, j)] = sol(unknown(i, j));
  field.u = co.u;

  std::vector<double> res;
  kernels::stencil_residual(grid_, co, field.phi, forcing, res);
  double rmax = 0.0, pmax = 0.0, fmax = 0.0;
  for (double v : res) rmax = std::max(rmax, std::abs(v));
  for (double v : field.phi) pmax = std::max(pmax, std::abs(v));
  for (double v : forcing) fmax = std::max(fmax, std::abs(v));
  field.max_residual = rmax;
  // componentwise backward-error style acceptance
  if (rmax > tol_linear_ * (row_scale_max * pmax + fmax + 1.0)) {
    throw NumericalError("PotentialSolver: discrete residual above tol_linear");
  }
  field.min_value = *std::min_element(field.phi.begin(), field.phi.end());
  field.max_value = *std::max_element(field.phi.begin(), field.phi.end());
  if (forcing.empty()) {
    // discrete maximum-principle surrogate: an unforced solve should stay
    // inside the range of its Dirichlet data; excursions mean the mixed
    // term broke monotonicity on this grid (warning, not failure)
    const double dmin = *std::min_element(dirichlet_full.begin(), dirichlet_full.end());
    const double dmax = *std::max_element(dirichlet_full.begin(), dirichlet_full.end());
    const double slack = 1e-12 * std::max(1.0, dmax - dmin);
    if (field.min_value < dmin - slack || field.max_value > dmax + slack) {
      std::fprintf(stderr,
                   "PotentialSolver: solution range [%g, %g] leaves the data range [%g, %g]; "
                   "grid too coarse for the mixed-term monotonicity\n",
                   field.min_value, field.max_value, dmin, dmax);
    }
  }
  return field;
}

PotentialField solve_potential(PotentialSolver& solver, const std::vector<double>& u,
                               const ModelParams& p) {
  const TransformedCoefficients co =
      derive_transformed_pde(solver.grid(), u, p.eps, p.kappa_stop);
  return solver.solve(co);
}

namespace {
void require_consistent(const PotentialField& field, const std::vector<double>& u) {
  if (field.u.size() != u.size()) throw ArgumentError("potential field inconsistent with u");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (field.u[i] != u[i]) throw ArgumentError("potential field inconsistent with u");
  }
}

double min_gap_guard(const std::vector<double>& u, double kappa_stop, const char* where) {
  double gap = 1.0 + u[0];
  for (double ui : u) gap = std::min(gap, 1.0 + ui);
  if (gap < kappa_stop) throw TouchdownError(std::string(where) + ": gap below kappa_stop", 0.0, gap);
  return gap;
}
}  // namespace

std::vector<double> gradient_trace(const Grid2D& grid, const PotentialField& field,
                                   const std::vector<double>& u, double eps, double kappa_stop) {
  require_consistent(field, u);
  min_gap_guard(u, kappa_stop, "gradient_trace");
  const int n = grid.gx.n_interior;
  const int m = grid.m_interior;
  const double k = grid.k;
  const PlateDerivatives d = plate_derivatives(grid.gx, u);
  std::vector<double> g(n);
  for (int i = 1; i <= n; ++i) {
    const double dphi = (3.0 * field.phi[grid.node(i, m + 1)] - 4.0 * field.phi[grid.node(i, m)] +
                         field.phi[grid.node(i, m - 1)]) / (2.0 * k);
    const double gap = 1.0 + u[i - 1];
    const double uxi = d.ux[i - 1];
    g[i - 1] = (1.0 + eps * eps * uxi * uxi) * dphi * dphi / (gap * gap);
  }
  return g;
}

double electrostatic_energy(const Grid2D& grid, const PotentialField& field,
                            const std::vector<double>& u, double eps, double kappa_stop) {
  require_consistent(field, u);
  min_gap_guard(u, kappa_stop, "electrostatic_energy");
  const PlateDerivatives d = plate_derivatives(grid.gx, u);
  return kernels::energy_trapezoid(grid, field.phi, u, d.ux, eps);
}

double electrostatic_energy_midpoint(const Grid2D& grid, const PotentialField& field,
                                     const std::vector<double>& u, double eps, double kappa_stop) {
  require_consistent(field, u);
  min_gap_guard(u, kappa_stop, "electrostatic_energy");
  const PlateDerivatives d = plate_derivatives(grid.gx, u);
  return kernels::energy_midpoint(grid, field.phi, u, d.ux, eps);
}

double h2_norm(const Grid2D& grid, const std::vector<double>& w_full) {
  return std::sqrt(kernels::h2_norm_sq(grid, w_full));
}

LipschitzReport lipschitz_probe(PotentialSolver& solver, const std::vector<double>& u1,
                                const std::vector<double>& u2, const ModelParams& p,
                                const FractionalNormContext& ctx, double denom_order) {
  if (!check_S_alpha(u1, p.kappa, ctx).member || !check_S_alpha(u2, p.kappa, ctx).member) {
    throw AdmissibilityError("lipschitz_probe: both states must lie in S_alpha(kappa)");
  }
  LipschitzReport rep;
  std::vector<double> du(u1.size());
  for (std::size_t i = 0; i < u1.size(); ++i) du[i] = u1[i] - u2[i];
  rep.separation = ctx.norm(du, denom_order);
  if (rep.separation == 0.0) {
    rep.identical = true;  // 0/0: report as identical inputs, quotients stay 0
    return rep;
  }
  const PotentialField f1 = solve_potential(solver, u1, p);
  const PotentialField f2 = solve_potential(solver, u2, p);
  std::vector<double> dphi(f1.phi.size());
  for (std::size_t i = 0; i < dphi.size(); ++i) dphi[i] = f1.phi[i] - f2.phi[i];
  rep.phi_quotient = h2_norm(solver.grid(), dphi) / rep.separation;

  const std::vector<double> g1 = gradient_trace(solver.grid(), f1, u1, p.eps, p.kappa_stop);
  const std::vector<double> g2 = gradient_trace(solver.grid(), f2, u2, p.eps, p.kappa_stop);
  std::vector<double> dg(g1.size());
  for (std::size_t i = 0; i < g1.size(); ++i) dg[i] = g1[i] - g2[i];
  rep.g_quotient = ctx.norm(dg, ctx.alpha()) / rep.separation;
  return rep;
}

}  // namespace mems
