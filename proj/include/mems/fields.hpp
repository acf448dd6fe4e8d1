#pragma once

#include <vector>

#include "mems/grid.hpp"

namespace mems {

// Plate displacement and velocity on the interior nodes at time t.
// Clamped wall values are implicit.  Admissibility (min(1+u) > 0) is the
// caller's contract whenever the state reaches the potential module.
struct PlateState {
  std::vector<double> u;
  std::vector<double> v;
  double t = 0.0;

  double min_gap() const {
    double g = 1.0 + u[0];
    for (double ui : u) g = std::min(g, 1.0 + ui);
    return g;
  }
  double sup_u() const {
    double s = 0.0;
    for (double ui : u) s = std::max(s, std::abs(ui));
    return s;
  }
};

// Coefficient fields of the transformed elliptic operator
//   a phi_xx + b phi_xeta + c phi_etaeta + d phi_eta = 0
// on interior nodes (row-major, j*n + i over i = 0..n-1, j = 0..m-1),
// together with the u-derivative samples they came from.
struct TransformedCoefficients {
  int n = 0, m = 0;
  double eps = 0.0;
  std::vector<double> a, b, c, d;
  std::vector<double> u, ux, uxx;  // on interior x nodes

  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * n + i; }
};

// Transformed potential phi on the full tensor grid including boundary
// nodes (layout Grid2D::node).  Carries the u it was solved against and the
// interior residual of the discrete equation as a diagnostic.
struct PotentialField {
  std::vector<double> phi;  // (n+2) x (m+2) values
  std::vector<double> u;    // generating displacement (interior nodes)
  double max_residual = 0.0;
  double min_value = 0.0;  // extremes over the grid; a monotone-scheme
  double max_value = 1.0;  // surrogate puts them in [0,1] (grid-too-coarse warning otherwise)
};

}  // namespace mems
