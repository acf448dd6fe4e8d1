#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "mems/banded.hpp"
#include "mems/grid.hpp"

namespace mems {

// Discrete clamped plate operator
//   A_h ~ beta d^4/dx^4 - tau d^2/dx^2
// on the interior nodes of a Grid1D.  The walls carry u = u_x = 0; the slope
// condition enters through the ghost reflection u_{-1} = u_1, which keeps the
// matrix symmetric and the scheme second order (pointwise consistency is lost
// only at the two wall-adjacent rows, where the ghost substitution leaves an
// O(1/h) defect of the kind the inverse damps).
class PlateOperator {
public:
  PlateOperator(const Grid1D& grid, double beta, double tau);

  const Grid1D& grid() const { return grid_; }
  double beta() const { return beta_; }
  double tau() const { return tau_; }
  int size() const { return grid_.n_interior; }

  // A_h y, evaluated as nested second differences in extended precision.
  // At 1/h^4 scale a plain double stencil sum floors the achievable residual
  // of downstream Newton iterations above tol_newton; the long double path
  // keeps the evaluation error ~ |u| eps_80 / h^4.
  std::vector<double> apply(const std::vector<double>& y) const;

  // Quadratic form <A_h y, y>_h with the trapezoidal L2 weight h.
  double quadratic_form(const std::vector<double>& y) const;

  // Banded view (half-bandwidth 2) of the assembled matrix.
  const BandedSPD& matrix() const { return matrix_; }

  // Dense copy, row-major n x n (used by Newton Jacobians and eigensolvers).
  std::vector<double> dense() const;

  // Solve (sigma I + c A_h) z = rhs.  Factorizations are cached per exact
  // (sigma, c) pair and reused, so repeated solves with identical
  // coefficients are bitwise identical.  Cache access is serialized.
  std::vector<double> solve_shifted(double sigma, double c, const std::vector<double>& rhs) const;
  std::shared_ptr<const BandedSPD> factor_shifted(double sigma, double c) const;

private:
  Grid1D grid_;
  double beta_;
  double tau_;
  BandedSPD matrix_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<double, double>, std::shared_ptr<const BandedSPD>> shift_cache_;
};

PlateOperator assemble_plate_operator(const Grid1D& grid, double beta, double tau);

// Smallest eigenpair of A_h.  The eigenvector is normalized to unit discrete
// L2 norm and sign-fixed to positive mean.  residual is the backward-error
// scaled defect ||A e - mu e||_h / (mu_max ||e||_h).
struct PrincipalEigenpair {
  double mu1 = 0.0;
  std::vector<double> e1;
  double residual = 0.0;
};

PrincipalEigenpair principal_eigenpair(const PlateOperator& op, double tol_linear);

}  // namespace mems
