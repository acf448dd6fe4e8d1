#pragma once

#include "mems/errors.hpp"

namespace mems {

// Model and solver parameters.  The dimensionless plate equation is
//   gamma^2 u_tt + u_t + beta u_xxxx - tau u_xx = -lambda g(u)
// on I = (-1,1) with clamped walls, coupled to the elliptic potential
// problem in the gap of aspect ratio eps.
struct ModelParams {
  double gamma = 0.0;    // inertia/damping ratio, >= 0 (0 selects the parabolic flow)
  double beta = 1.0;     // bending stiffness, > 0
  double tau = 0.0;      // stretching, >= 0
  double lambda = 1.0;   // applied voltage (squared), > 0 in forced runs, >= 0 accepted
  double eps = 0.3;      // device aspect ratio, >= 0 (0 = small-aspect-ratio model)
  double alpha2 = 0.25;  // fractional index 2*alpha in (0, 1/2)
  double kappa = 0.2;      // admissible-set margin, in (0,1)
  double kappa_stop = 0.01;  // numerical touchdown threshold, in (0, kappa)
  double gamma1 = 1.0;   // decay-regime cap gamma_1 > 0

  int n_interior = 127;  // interior x nodes
  int m_interior = 31;   // interior eta nodes

  double dt = 1e-3;
  double t_end = 1.0;
  int stride = 10;  // ledger / snapshot stride in steps

  double tol_newton = 1e-10;  // steady-state residual, discrete L2 norm
  double tol_linear = 1e-8;   // linear solves and eigen residuals (backward-error scaled)

  bool closed_form_g = false;  // use g(u) = (1+u)^-2 instead of the elliptic solve

  double alpha() const { return 0.5 * alpha2; }

  void validate() const {
    if (gamma < 0.0) throw ParameterError("gamma must be >= 0");
    if (beta <= 0.0) throw ParameterError("beta must be > 0");
    if (tau < 0.0) throw ParameterError("tau must be >= 0");
    if (lambda < 0.0) throw ParameterError("lambda must be >= 0");
    if (eps < 0.0) throw ParameterError("eps must be >= 0");
    if (!(alpha2 > 0.0 && alpha2 < 0.5)) throw ParameterError("alpha2 must lie in (0, 1/2)");
    if (!(kappa > 0.0 && kappa < 1.0)) throw ParameterError("kappa must lie in (0,1)");
    if (!(kappa_stop > 0.0 && kappa_stop < kappa)) {
      throw ParameterError("require 0 < kappa_stop < kappa");
    }
    if (gamma1 <= 0.0) throw ParameterError("gamma1 must be > 0");
    if (n_interior < 5) throw ParameterError("n_interior must be >= 5");
    if (m_interior < 3) throw ParameterError("m_interior must be >= 3");
    if (dt <= 0.0) throw ParameterError("dt must be > 0");
    if (t_end <= 0.0) throw ParameterError("t_end must be > 0");
    if (stride < 1) throw ParameterError("stride must be >= 1");
    if (tol_newton <= 0.0 || tol_linear <= 0.0) throw ParameterError("tolerances must be > 0");
  }
};

}  // namespace mems
