#pragma once

#include <vector>

#include "mems/errors.hpp"

namespace mems {

// Uniform grid on I = (-1,1).  Only interior nodes carry unknowns; the wall
// values and the clamped slope condition are encoded in the operator stencil.
struct Grid1D {
  int n_interior = 0;
  double h = 0.0;
  std::vector<double> x;  // interior coordinates, x[i] = -1 + (i+1) h

  static Grid1D make(int n_interior) {
    if (n_interior < 5) {
      throw ParameterError("Grid1D: need at least 5 interior nodes for the biharmonic stencil");
    }
    Grid1D g;
    g.n_interior = n_interior;
    g.h = 2.0 / (n_interior + 1);
    g.x.resize(n_interior);
    for (int i = 0; i < n_interior; ++i) g.x[i] = -1.0 + (i + 1) * g.h;
    return g;
  }
};

// Tensor grid on the fixed rectangle I x (0,1).  eta_0 = 0 and eta_{m+1} = 1
// are boundary rows; the x-direction reuses Grid1D.
struct Grid2D {
  Grid1D gx;
  int m_interior = 0;
  double k = 0.0;
  std::vector<double> eta;  // interior coordinates, eta[j] = (j+1) k

  static Grid2D make(const Grid1D& gx, int m_interior) {
    if (m_interior < 3) throw ParameterError("Grid2D: need at least 3 interior eta nodes");
    Grid2D g;
    g.gx = gx;
    g.m_interior = m_interior;
    g.k = 1.0 / (m_interior + 1);
    g.eta.resize(m_interior);
    for (int j = 0; j < m_interior; ++j) g.eta[j] = (j + 1) * g.k;
    return g;
  }

  // Nodes including boundaries: (n+2) x (m+2), row-major in j (eta) then i (x).
  int nx_total() const { return gx.n_interior + 2; }
  int neta_total() const { return m_interior + 2; }
  std::size_t total_nodes() const {
    return static_cast<std::size_t>(nx_total()) * static_cast<std::size_t>(neta_total());
  }
  std::size_t node(int i, int j) const {  // i in [0, n+1], j in [0, m+1]
    return static_cast<std::size_t>(j) * nx_total() + i;
  }
  double x_of(int i) const { return -1.0 + i * gx.h; }
  double eta_of(int j) const { return j * k; }
};

}  // namespace mems
