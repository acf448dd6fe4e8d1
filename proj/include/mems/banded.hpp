#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mems/errors.hpp"

namespace mems {

// Symmetric positive definite band matrix with half-bandwidth p, stored by
// diagonals: diag(d)[i] = A(i, i+d) for d = 0..p.  Factorization is an
// in-place banded LDL^T (no pivoting; SPD input required).  A factored
// object is immutable afterwards, so repeated solves are bitwise
// reproducible.
class BandedSPD {
public:
  BandedSPD() = default;
  BandedSPD(int n, int halfband) : n_(n), p_(halfband), band_(static_cast<std::size_t>(n) * (halfband + 1), 0.0) {}

  int size() const { return n_; }
  int halfband() const { return p_; }

  double& at(int i, int j) {  // j >= i, j - i <= p
    return band_[static_cast<std::size_t>(j - i) * n_ + i];
  }
  double at(int i, int j) const { return band_[static_cast<std::size_t>(j - i) * n_ + i]; }

  // y = A x for the unfactored matrix.
  std::vector<double> multiply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n_) throw ArgumentError("BandedSPD::multiply: size mismatch");
    std::vector<double> y(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      double s = at(i, i) * x[i];
      for (int d = 1; d <= p_; ++d) {
        if (i + d < n_) s += at(i, i + d) * x[i + d];
        if (i - d >= 0) s += at(i - d, i) * x[i - d];
      }
      y[i] = s;
    }
    return y;
  }

  // Banded LDL^T: A = L D L^T with unit lower band L and positive D.
  // Throws NumericalError if a pivot is not strictly positive.
  void factorize() {
    if (factored_) return;
    lower_ = band_;  // reuse layout: lower_[d*n+i] = L(i+d, i), lower_[0*n+i] = D(i)
    for (int j = 0; j < n_; ++j) {
      double dj = lower_[j];
      for (int d = 1; d <= p_; ++d) {
        int k = j - d;
        if (k >= 0) dj -= lower_[static_cast<std::size_t>(d) * n_ + k] * lower_[static_cast<std::size_t>(d) * n_ + k] * lower_[k];
      }
      if (!(dj > 0.0)) throw NumericalError("BandedSPD::factorize: nonpositive pivot (matrix not SPD)");
      lower_[j] = dj;
      for (int d = 1; d <= p_; ++d) {
        int i = j + d;
        if (i >= n_) break;
        double lij = band_[static_cast<std::size_t>(d) * n_ + j];  // A(j, j+d) = A(i=j+d, j)
        for (int e = 1; e <= p_ - d; ++e) {
          int k = j - e;
          if (k >= 0) {
            lij -= lower_[static_cast<std::size_t>(d + e) * n_ + k] * lower_[static_cast<std::size_t>(e) * n_ + k] * lower_[k];
          }
        }
        lower_[static_cast<std::size_t>(d) * n_ + j] = lij / dj;
      }
    }
    factored_ = true;
  }

  // Solve A x = b after factorize().
  std::vector<double> solve(const std::vector<double>& b) const {
    if (!factored_) throw NumericalError("BandedSPD::solve: factorize() first");
    if (static_cast<int>(b.size()) != n_) throw ArgumentError("BandedSPD::solve: size mismatch");
    std::vector<double> x = b;
    for (int i = 0; i < n_; ++i) {  // L z = b
      double s = x[i];
      for (int d = 1; d <= p_; ++d) {
        int k = i - d;
        if (k >= 0) s -= lower_[static_cast<std::size_t>(d) * n_ + k] * x[k];
      }
      x[i] = s;
    }
    for (int i = 0; i < n_; ++i) x[i] /= lower_[i];  // D y = z
    for (int i = n_ - 1; i >= 0; --i) {  // L^T x = y
      double s = x[i];
      for (int d = 1; d <= p_; ++d) {
        int k = i + d;
        if (k < n_) s -= lower_[static_cast<std::size_t>(d) * n_ + i] * x[k];
      }
      x[i] = s;
    }
    return x;
  }

  bool factored() const { return factored_; }

private:
  int n_ = 0;
  int p_ = 0;
  std::vector<double> band_;
  std::vector<double> lower_;
  bool factored_ = false;
};

}  // namespace mems
