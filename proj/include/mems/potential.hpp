#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <functional>
#include <vector>

#include "mems/fields.hpp"
#include "mems/grid.hpp"
#include "mems/params.hpp"
#include "mems/spectral.hpp"

namespace mems {

struct PlateDerivatives {
  std::vector<double> ux, uxx;  // centered differences, clamped wall closure
};

PlateDerivatives plate_derivatives(const Grid1D& grid, const std::vector<double>& u);

// Coefficients of the fixed-rectangle form of the gap problem.  With
// eta(x,z) = (1+z)/(1+u(x)) the rescaled Laplace equation
// eps^2 psi_xx + psi_zz = 0 becomes
//   a phi_xx + b phi_xeta + c phi_etaeta + d phi_eta = 0,
//   a = eps^2,
//   b = -2 eps^2 eta u_x/(1+u),
//   c = (1 + eps^2 eta^2 u_x^2)/(1+u)^2,
//   d = eps^2 eta (2 u_x^2/(1+u)^2 - u_xx/(1+u)),
// derived by the chain rule (eta_x = -eta u_x/(1+u), eta_z = 1/(1+u),
// eta_xx = eta(2u_x^2/(1+u)^2 - u_xx/(1+u))); the tests pin these against a
// symbolic oracle.  Coefficients blow up like (1+u)^-2, hence the
// kappa_stop guard.
TransformedCoefficients derive_transformed_pde(const Grid2D& grid, const std::vector<double>& u,
                                               double eps, double kappa_stop);

// 9-point finite-difference solver on the fixed rectangle with Dirichlet
// data phi = eta (the transformed boundary condition) or caller-supplied
// data for manufactured-solution runs.  The sparsity pattern is analyzed
// once per grid and refactorized per call; instances are not thread-safe,
// use one per worker.
class PotentialSolver {
public:
  PotentialSolver(const Grid2D& grid, double tol_linear);

  const Grid2D& grid() const { return grid_; }

  PotentialField solve(const TransformedCoefficients& co);
  PotentialField solve_forced(const TransformedCoefficients& co, const std::vector<double>& forcing,
                              const std::vector<double>& dirichlet_full);

private:
  PotentialField run(const TransformedCoefficients& co, const std::vector<double>& forcing,
                     const std::vector<double>& dirichlet_full);

  Grid2D grid_;
  double tol_linear_;
  Eigen::SparseMatrix<double> mat_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  bool pattern_ready_ = false;
};

// Convenience wrapper: derive coefficients for u and solve with phi = eta data.
PotentialField solve_potential(PotentialSolver& solver, const std::vector<double>& u,
                               const ModelParams& p);

// Squared field trace on the plate,
//   g(x) = (1 + eps^2 u_x^2) (d_eta phi(x,1))^2 / (1+u)^2,
// using psi_x = -u_x psi_z along the plate and psi_z = phi_eta/(1+u);
// the eta-derivative at eta = 1 is the one-sided second-order 3-point value.
std::vector<double> gradient_trace(const Grid2D& grid, const PotentialField& field,
                                   const std::vector<double>& u, double eps, double kappa_stop);

// Electrostatic energy on the pulled-back gap,
//   E_e = int int [eps^2 (phi_x - eta u_x phi_eta/(1+u))^2
//                  + phi_eta^2/(1+u)^2] (1+u) deta dx,
// by trapezoidal quadrature; the midpoint variant is the independent
// cross-check quadrature.
double electrostatic_energy(const Grid2D& grid, const PotentialField& field,
                            const std::vector<double>& u, double eps, double kappa_stop);
double electrostatic_energy_midpoint(const Grid2D& grid, const PotentialField& field,
                                     const std::vector<double>& u, double eps, double kappa_stop);

double h2_norm(const Grid2D& grid, const std::vector<double>& w_full);

// Empirical Lipschitz quotients between two admissible states (diagnostic):
//   ||phi_1 - phi_2||_{h,2} / ||u_1 - u_2||_{denom_order}
//   ||g(u_1) - g(u_2)||_{alpha} / ||u_1 - u_2||_{denom_order}
struct LipschitzReport {
  bool identical = false;  // 0/0 sentinel when u_1 == u_2
  double phi_quotient = 0.0;
  double g_quotient = 0.0;
  double separation = 0.0;  // ||u_1 - u_2||_{denom_order}
};

LipschitzReport lipschitz_probe(PotentialSolver& solver, const std::vector<double>& u1,
                                const std::vector<double>& u2, const ModelParams& p,
                                const FractionalNormContext& ctx, double denom_order);

}  // namespace mems
