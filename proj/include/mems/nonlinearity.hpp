#pragma once

#include <optional>
#include <vector>

#include "mems/potential.hpp"

namespace mems {

// Right-hand-side nonlinearity g(u): either the gradient trace of the full
// elliptic solve in the gap, or the small-aspect-ratio closed form
// g = (1+u)^-2 (the eps = 0 reduction, also usable as a fast model variant).
class NonlinearityEvaluator {
public:
  NonlinearityEvaluator(const Grid2D& grid, const ModelParams& p)
      : grid_(grid), params_(p), solver_(grid, p.tol_linear) {}

  bool closed_form() const { return params_.closed_form_g; }
  const Grid2D& grid() const { return grid_; }
  const ModelParams& params() const { return params_; }

  std::vector<double> g(const std::vector<double>& u) {
    if (params_.closed_form_g) return g_closed_form(u);
    const PotentialField f = solve_potential(solver_, u, params_);
    return gradient_trace(grid_, f, u, params_.eps, params_.kappa_stop);
  }

  struct Sample {
    std::vector<double> g;
    double energy = 0.0;           // trapezoidal E_e
    double energy_midpoint = 0.0;  // independent quadrature
    std::optional<PotentialField> field;
  };

  Sample sample(const std::vector<double>& u) {
    Sample s;
    if (params_.closed_form_g) {
      s.g = g_closed_form(u);
      s.energy = energy_closed_form(u);
      s.energy_midpoint = s.energy;
      return s;
    }
    PotentialField f = solve_potential(solver_, u, params_);
    s.g = gradient_trace(grid_, f, u, params_.eps, params_.kappa_stop);
    s.energy = electrostatic_energy(grid_, f, u, params_.eps, params_.kappa_stop);
    s.energy_midpoint = electrostatic_energy_midpoint(grid_, f, u, params_.eps, params_.kappa_stop);
    s.field = std::move(f);
    return s;
  }

private:
  std::vector<double> g_closed_form(const std::vector<double>& u) const {
    double gap = 1.0 + u[0];
    for (double ui : u) gap = std::min(gap, 1.0 + ui);
    if (gap < params_.kappa_stop) {
      throw TouchdownError("closed-form g: gap below kappa_stop", 0.0, gap);
    }
    std::vector<double> g(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) g[i] = 1.0 / ((1.0 + u[i]) * (1.0 + u[i]));
    return g;
  }

  // eps = 0 electrostatic energy, E_e = int_I dx/(1+u); walls contribute 1.
  double energy_closed_form(const std::vector<double>& u) const {
    double s = 1.0;  // two half-weighted wall nodes with integrand 1
    for (double ui : u) s += 1.0 / (1.0 + ui);
    return s * grid_.gx.h;
  }

  Grid2D grid_;
  ModelParams params_;
  PotentialSolver solver_;
};

}  // namespace mems
