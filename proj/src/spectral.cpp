#include "mems/spectral.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "mems/errors.hpp"
#include "mems/kernels.hpp"

namespace mems {

FractionalNormContext::FractionalNormContext(const PlateOperator& op, double alpha,
                                             double tol_linear)
    : n_(op.size()), alpha_(alpha), h_(op.grid().h) {
  Eigen::MatrixXd a(n_, n_);
  {
    const std::vector<double> d = op.dense();
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) a(i, j) = d[static_cast<std::size_t>(i) * n_ + j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) {
    throw NumericalError("FractionalNormContext: eigensolver failed");
  }
  mu_.assign(es.eigenvalues().data(), es.eigenvalues().data() + n_);
  if (!(mu_[0] > 0.0)) throw NumericalError("FractionalNormContext: A_h not positive definite");
  q_.assign(es.eigenvectors().data(), es.eigenvectors().data() + static_cast<std::size_t>(n_) * n_);

  const Eigen::MatrixXd defect =
      es.eigenvectors().transpose() * es.eigenvectors() - Eigen::MatrixXd::Identity(n_, n_);
  ortho_defect_ = defect.cwiseAbs().maxCoeff();
  if (ortho_defect_ > tol_linear) {
    throw NumericalError("FractionalNormContext: eigenvector basis not orthogonal to tol_linear");
  }

  w_alpha_ = weights_for(alpha_);
  w_one_ = mu_;
  w_one_alpha_ = weights_for(1.0 + alpha_);
}

std::vector<double> FractionalNormContext::transform(const std::vector<double>& z) const {
  if (static_cast<int>(z.size()) != n_) throw ArgumentError("fractional norm: dimension mismatch");
  std::vector<double> c(n_);
  kernels::spectral_transform(q_.data(), n_, z.data(), c.data());
  return c;
}

std::vector<double> FractionalNormContext::weights_for(double s) const {
  std::vector<double> w(n_);
  for (int i = 0; i < n_; ++i) w[i] = std::pow(mu_[i], s);
  return w;
}

std::vector<double> FractionalNormContext::eigenvector(int k) const {
  std::vector<double> e(n_);
  const double* col = q_.data() + static_cast<std::size_t>(k) * n_;
  double mean = 0.0;
  for (int i = 0; i < n_; ++i) mean += col[i];
  const double scale = (mean < 0.0 ? -1.0 : 1.0) / std::sqrt(h_);
  for (int i = 0; i < n_; ++i) e[i] = scale * col[i];
  return e;
}

double FractionalNormContext::norm(const std::vector<double>& z, double s) const {
  const std::vector<double> c = transform(z);
  const std::vector<double>* w = nullptr;
  std::vector<double> scratch;
  if (s == 0.0) {
    long double acc = 0.0L;
    for (double ci : c) acc += static_cast<long double>(ci) * ci;
    return std::sqrt(static_cast<double>(acc) * h_);
  } else if (s == alpha_) {
    w = &w_alpha_;
  } else if (s == 1.0) {
    w = &w_one_;
  } else if (s == 1.0 + alpha_) {
    w = &w_one_alpha_;
  } else {
    scratch = weights_for(s);
    w = &scratch;
  }
  long double acc = 0.0L;
  for (int i = 0; i < n_; ++i) acc += static_cast<long double>((*w)[i]) * c[i] * c[i];
  return std::sqrt(static_cast<double>(acc) * h_);
}

double FractionalNormContext::inner(const std::vector<double>& y, const std::vector<double>& z,
                                    double s) const {
  const std::vector<double> cy = transform(y);
  const std::vector<double> cz = transform(z);
  std::vector<double> w = (s == 0.0) ? std::vector<double>(n_, 1.0) : weights_for(s);
  long double acc = 0.0L;
  for (int i = 0; i < n_; ++i) acc += static_cast<long double>(w[i]) * cy[i] * cz[i];
  return static_cast<double>(acc) * h_;
}

std::vector<double> FractionalNormContext::apply_power(const std::vector<double>& z,
                                                       double s) const {
  std::vector<double> c = transform(z);
  const std::vector<double> w = weights_for(s);
  for (int i = 0; i < n_; ++i) c[i] *= w[i];
  // back-transform: z' = Q c
  std::vector<double> out(n_, 0.0);
  for (int r = 0; r < n_; ++r) {
    const double* col = q_.data() + static_cast<std::size_t>(r) * n_;
    const double cr = c[r];
    for (int i = 0; i < n_; ++i) out[i] += col[i] * cr;
  }
  return out;
}

double FractionalNormContext::embedding_constant_sup() const {
  double c4 = 0.0;
  for (int k = 0; k < n_; ++k) {
    const double* col = q_.data() + static_cast<std::size_t>(k) * n_;
    double sup = 0.0;
    for (int i = 0; i < n_; ++i) sup = std::max(sup, std::abs(col[i]));
    sup /= std::sqrt(h_);  // unit-L2h eigenvector sup norm
    // ||e_k||_{1+alpha} = mu_k^{(1+alpha)/2} for the unit-L2h eigenvector
    c4 = std::max(c4, sup / std::pow(mu_[k], 0.5 * (1.0 + alpha_)));
  }
  return c4;
}

double fractional_norm(const std::vector<double>& z, double s, const FractionalNormContext& ctx) {
  return ctx.norm(z, s);
}

SAlphaReport check_S_alpha(const std::vector<double>& u, double kappa,
                           const FractionalNormContext& ctx) {
  SAlphaReport r;
  r.norm_value = ctx.norm(u, 1.0 + ctx.alpha());
  r.gap_value = 1.0 + u[0];
  for (double ui : u) r.gap_value = std::min(r.gap_value, 1.0 + ui);
  r.norm_margin = 1.0 / kappa - r.norm_value;
  r.gap_margin = r.gap_value - kappa;
  r.member = (r.norm_margin > 0.0) && (r.gap_margin > 0.0);
  return r;
}

}  // namespace mems
