#pragma once

#include <vector>

#include "mems/fields.hpp"
#include "mems/grid.hpp"

// Data-parallel inner kernels.  Every kernel exists twice: a serial
// reference implementation and an OpenMP variant.  The OpenMP variants
// parallelize over grid rows (or eigenrows) and keep per-row arithmetic in
// the same order as the serial code, so both backends produce bitwise
// identical results for any thread count; the tests assert that and the
// bench target times the two against each other.
namespace mems::kernels {

enum class Backend { Serial, OpenMP };

void set_backend(Backend b);
Backend backend();
int max_threads();

// ---- transformed-PDE coefficient assembly --------------------------------

void assemble_coefficients_serial(const Grid2D& grid, const std::vector<double>& u,
                                  const std::vector<double>& ux, const std::vector<double>& uxx,
                                  double eps, TransformedCoefficients& out);
void assemble_coefficients_omp(const Grid2D& grid, const std::vector<double>& u,
                               const std::vector<double>& ux, const std::vector<double>& uxx,
                               double eps, TransformedCoefficients& out);
void assemble_coefficients(const Grid2D& grid, const std::vector<double>& u,
                           const std::vector<double>& ux, const std::vector<double>& uxx,
                           double eps, TransformedCoefficients& out);

// ---- 9-point stencil residual r = L(phi) - f on interior nodes -----------

void stencil_residual_serial(const Grid2D& grid, const TransformedCoefficients& co,
                             const std::vector<double>& phi_full, const std::vector<double>& forcing,
                             std::vector<double>& r);
void stencil_residual_omp(const Grid2D& grid, const TransformedCoefficients& co,
                          const std::vector<double>& phi_full, const std::vector<double>& forcing,
                          std::vector<double>& r);
void stencil_residual(const Grid2D& grid, const TransformedCoefficients& co,
                      const std::vector<double>& phi_full, const std::vector<double>& forcing,
                      std::vector<double>& r);

// ---- electrostatic energy quadratures -------------------------------------

// Trapezoidal quadrature of the pulled-back Dirichlet integrand
//   [eps^2 (phi_x - eta u_x phi_eta/(1+u))^2 + phi_eta^2/(1+u)^2] (1+u)
// over I x (0,1).  u, ux live on interior x nodes; walls carry u = u_x = 0.
double energy_trapezoid_serial(const Grid2D& grid, const std::vector<double>& phi_full,
                               const std::vector<double>& u, const std::vector<double>& ux,
                               double eps);
double energy_trapezoid_omp(const Grid2D& grid, const std::vector<double>& phi_full,
                            const std::vector<double>& u, const std::vector<double>& ux,
                            double eps);
double energy_trapezoid(const Grid2D& grid, const std::vector<double>& phi_full,
                        const std::vector<double>& u, const std::vector<double>& ux, double eps);

// Independent midpoint (cell-centered) quadrature of the same integrand,
// used as a cross-check of the trapezoidal value.
double energy_midpoint_serial(const Grid2D& grid, const std::vector<double>& phi_full,
                              const std::vector<double>& u, const std::vector<double>& ux,
                              double eps);
double energy_midpoint_omp(const Grid2D& grid, const std::vector<double>& phi_full,
                           const std::vector<double>& u, const std::vector<double>& ux, double eps);
double energy_midpoint(const Grid2D& grid, const std::vector<double>& phi_full,
                       const std::vector<double>& u, const std::vector<double>& ux, double eps);

// ---- discrete H^2 norm on the rectangle -----------------------------------

// Squared norm: trapezoidal L2 of w plus all centered difference quotients
// up to second order (x, eta, xx, etaeta, xeta) on the nodes where the
// stencils fit.
double h2_norm_sq_serial(const Grid2D& grid, const std::vector<double>& w_full);
double h2_norm_sq_omp(const Grid2D& grid, const std::vector<double>& w_full);
double h2_norm_sq(const Grid2D& grid, const std::vector<double>& w_full);

// ---- spectral transform ----------------------------------------------------

// out[r] = <column r of q, z> for a column-major n x n eigenvector matrix.
void spectral_transform_serial(const double* q_colmajor, int n, const double* z, double* out);
void spectral_transform_omp(const double* q_colmajor, int n, const double* z, double* out);
void spectral_transform(const double* q_colmajor, int n, const double* z, double* out);

}  // namespace mems::kernels
