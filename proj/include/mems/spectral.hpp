#pragma once

#include <vector>

#include "mems/plate_operator.hpp"

namespace mems {

// Spectral calibration of the discrete fractional scale.  The discrete
// H_D^{2s}-type norms are defined through powers of A_h,
//   ||z||_s := ||A_h^{s/2} z||_{L2,h},
// so the bridge ||A_h^{1/2} z||_{s'} = ||z||_{s'+1} holds exactly and the
// norm-equivalence constants of the decay machinery can be taken as 1
// (valid once mu_1 >= 1, which holds for the bending-dominated defaults).
class FractionalNormContext {
public:
  FractionalNormContext(const PlateOperator& op, double alpha, double tol_linear);

  int size() const { return n_; }
  double alpha() const { return alpha_; }
  double h() const { return h_; }
  double mu1() const { return mu_[0]; }
  double mu_max() const { return mu_[n_ - 1]; }
  const std::vector<double>& eigenvalues() const { return mu_; }

  // k-th eigenvector, unit discrete L2 norm, sign fixed to positive mean.
  std::vector<double> eigenvector(int k) const;

  // ||A_h^{s/2} z||_{L2,h}; s = 0 is the trapezoidal L2 norm.
  double norm(const std::vector<double>& z, double s) const;

  // <A_h^{s/2} y, A_h^{s/2} z>_{L2,h}
  double inner(const std::vector<double>& y, const std::vector<double>& z, double s) const;

  // A_h^s z evaluated spectrally.
  std::vector<double> apply_power(const std::vector<double>& z, double s) const;

  // max_ij |Q^T Q - I|, checked against tol_linear at construction.
  double ortho_defect() const { return ortho_defect_; }

  // sup-norm embedding constant surrogate: max over eigenvectors e_k of
  // ||e_k||_inf / ||e_k||_{1+alpha}.
  double embedding_constant_sup() const;

private:
  std::vector<double> transform(const std::vector<double>& z) const;  // Q^T z
  std::vector<double> weights_for(double s) const;                    // mu^s

  int n_ = 0;
  double alpha_ = 0.0;
  double h_ = 0.0;
  std::vector<double> mu_;
  std::vector<double> q_;  // eigenvectors, column-major, Euclidean-orthonormal
  double ortho_defect_ = 0.0;
  // precomputed half-power weights for the three scales the solver uses
  std::vector<double> w_alpha_, w_one_, w_one_alpha_;  // mu^alpha, mu^1, mu^{1+alpha}
};

double fractional_norm(const std::vector<double>& z, double s, const FractionalNormContext& ctx);

// Admissible-set membership S_alpha(kappa):
//   ||u||_{1+alpha} < 1/kappa  and  min(1+u) > kappa.
struct SAlphaReport {
  bool member = false;
  double norm_value = 0.0;
  double norm_margin = 0.0;  // 1/kappa - norm_value
  double gap_value = 0.0;    // min(1+u)
  double gap_margin = 0.0;   // gap_value - kappa
};

SAlphaReport check_S_alpha(const std::vector<double>& u, double kappa,
                           const FractionalNormContext& ctx);

}  // namespace mems
