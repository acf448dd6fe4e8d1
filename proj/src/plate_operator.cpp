#include "mems/plate_operator.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "mems/errors.hpp"

namespace mems {

PlateOperator::PlateOperator(const Grid1D& grid, double beta, double tau)
    : grid_(grid), beta_(beta), tau_(tau), matrix_(grid.n_interior, 2) {
  if (beta <= 0.0) throw ParameterError("assemble_plate_operator: beta must be > 0");
  if (tau < 0.0) throw ParameterError("assemble_plate_operator: tau must be >= 0");
  const int n = grid_.n_interior;
  const double h = grid_.h;
  const double b4 = beta_ / (h * h * h * h);
  const double t2 = tau_ / (h * h);
  // interior biharmonic stencil [1 -4 6 -4 1]/h^4, -tau d2 adds [-1 2 -1]/h^2
  for (int i = 0; i < n; ++i) {
    matrix_.at(i, i) = 6.0 * b4 + 2.0 * t2;
    if (i + 1 < n) matrix_.at(i, i + 1) = -4.0 * b4 - t2;
    if (i + 2 < n) matrix_.at(i, i + 2) = b4;
  }
  // ghost reflection u_{-1} = u_1 at each wall folds one unit of the outer
  // stencil weight back onto the first interior node
  matrix_.at(0, 0) += b4;
  matrix_.at(n - 1, n - 1) += b4;
}

std::vector<double> PlateOperator::apply(const std::vector<double>& y) const {
  const int n = grid_.n_interior;
  if (static_cast<int>(y.size()) != n) throw ArgumentError("PlateOperator::apply: size mismatch");
  const long double h = grid_.h;
  const long double h2 = h * h;
  const long double h4 = h2 * h2;
  // extended array: [ghost, wall=0, interior..., wall=0, ghost]
  std::vector<long double> ext(n + 4, 0.0L);
  for (int i = 0; i < n; ++i) ext[i + 2] = y[i];
  ext[0] = y[0];
  ext[n + 3] = y[n - 1];
  std::vector<long double> w(n + 2);
  for (int j = 0; j < n + 2; ++j) w[j] = ext[j] - 2.0L * ext[j + 1] + ext[j + 2];
  std::vector<double> out(n);
  const long double bl = beta_;
  const long double tl = tau_;
  for (int i = 0; i < n; ++i) {
    const long double d4 = (w[i] - 2.0L * w[i + 1] + w[i + 2]) / h4;
    out[i] = static_cast<double>(bl * d4 - tl * w[i + 1] / h2);
  }
  return out;
}

double PlateOperator::quadratic_form(const std::vector<double>& y) const {
  const std::vector<double> ay = apply(y);
  long double s = 0.0L;
  for (std::size_t i = 0; i < y.size(); ++i) s += static_cast<long double>(ay[i]) * y[i];
  return static_cast<double>(s * grid_.h);
}

std::vector<double> PlateOperator::dense() const {
  const int n = grid_.n_interior;
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d <= 2; ++d) {
      if (i + d < n) {
        a[static_cast<std::size_t>(i) * n + (i + d)] = matrix_.at(i, i + d);
        a[static_cast<std::size_t>(i + d) * n + i] = matrix_.at(i, i + d);
      }
    }
  }
  return a;
}

std::shared_ptr<const BandedSPD> PlateOperator::factor_shifted(double sigma, double c) const {
  std::scoped_lock lock(cache_mutex_);
  const auto key = std::make_pair(sigma, c);
  auto it = shift_cache_.find(key);
  if (it != shift_cache_.end()) return it->second;
  const int n = grid_.n_interior;
  auto fac = std::make_shared<BandedSPD>(n, 2);
  for (int i = 0; i < n; ++i) {
    fac->at(i, i) = sigma + c * matrix_.at(i, i);
    if (i + 1 < n) fac->at(i, i + 1) = c * matrix_.at(i, i + 1);
    if (i + 2 < n) fac->at(i, i + 2) = c * matrix_.at(i, i + 2);
  }
  fac->factorize();
  shift_cache_.emplace(key, fac);
  return fac;
}

std::vector<double> PlateOperator::solve_shifted(double sigma, double c,
                                                 const std::vector<double>& rhs) const {
  if (static_cast<int>(rhs.size()) != grid_.n_interior) {
    throw ArgumentError("solve_shifted: rhs size mismatch");
  }
  return factor_shifted(sigma, c)->solve(rhs);
}

PlateOperator assemble_plate_operator(const Grid1D& grid, double beta, double tau) {
  return PlateOperator(grid, beta, tau);
}

PrincipalEigenpair principal_eigenpair(const PlateOperator& op, double tol_linear) {
  const int n = op.size();
  Eigen::MatrixXd a(n, n);
  {
    const std::vector<double> d = op.dense();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = d[static_cast<std::size_t>(i) * n + j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) {
    throw NumericalError("principal_eigenpair: dense symmetric eigensolver failed to converge");
  }
  PrincipalEigenpair out;
  out.mu1 = es.eigenvalues()(0);
  if (!(out.mu1 > 0.0)) {
    throw NumericalError("principal_eigenpair: operator not positive definite (mu1 <= 0)");
  }
  const double h = op.grid().h;
  Eigen::VectorXd v = es.eigenvectors().col(0);
  double mean = v.sum();
  if (mean < 0.0) v = -v;
  v /= std::sqrt(h) * v.norm();  // unit discrete L2 norm
  out.e1.assign(v.data(), v.data() + n);

  const std::vector<double> av = op.apply(out.e1);
  long double r2 = 0.0L;
  for (int i = 0; i < n; ++i) {
    const long double d = av[i] - out.mu1 * out.e1[i];
    r2 += d * d;
  }
  const double mu_max = es.eigenvalues()(n - 1);
  out.residual = std::sqrt(static_cast<double>(r2) * h) / mu_max;
  if (out.residual > tol_linear) {
    throw NumericalError("principal_eigenpair: residual above tol_linear after eigensolve");
  }
  return out;
}

}  // namespace mems
