#include "mems/kernels.hpp"

#include <atomic>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mems/errors.hpp"

namespace mems::kernels {

namespace {
std::atomic<Backend> g_backend{
#ifdef _OPENMP
    Backend::OpenMP
#else
    Backend::Serial
#endif
};
}  // namespace

void set_backend(Backend b) { g_backend.store(b); }
Backend backend() { return g_backend.load(); }

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// ---------------------------------------------------------------------------
// coefficient assembly
// ---------------------------------------------------------------------------

namespace {

inline void coeff_row(const Grid2D& grid, const std::vector<double>& u,
                      const std::vector<double>& ux, const std::vector<double>& uxx, double eps,
                      int j, TransformedCoefficients& out) {
  const int n = grid.gx.n_interior;
  const double eta = grid.eta[j];
  const double e2 = eps * eps;
  for (int i = 0; i < n; ++i) {
    const double gap = 1.0 + u[i];
    const double gi = 1.0 / gap;
    const std::size_t id = out.idx(i, j);
    out.a[id] = e2;
    out.b[id] = -2.0 * e2 * eta * ux[i] * gi;
    out.c[id] = (1.0 + e2 * eta * eta * ux[i] * ux[i]) * gi * gi;
    out.d[id] = e2 * eta * (2.0 * ux[i] * ux[i] * gi * gi - uxx[i] * gi);
  }
}

void coeff_prepare(const Grid2D& grid, TransformedCoefficients& out, double eps,
                   const std::vector<double>& u, const std::vector<double>& ux,
                   const std::vector<double>& uxx) {
  out.n = grid.gx.n_interior;
  out.m = grid.m_interior;
  out.eps = eps;
  const std::size_t sz = static_cast<std::size_t>(out.n) * out.m;
  out.a.resize(sz);
  out.b.resize(sz);
  out.c.resize(sz);
  out.d.resize(sz);
  out.u = u;
  out.ux = ux;
  out.uxx = uxx;
}

}  // namespace

void assemble_coefficients_serial(const Grid2D& grid, const std::vector<double>& u,
                                  const std::vector<double>& ux, const std::vector<double>& uxx,
                                  double eps, TransformedCoefficients& out) {
  coeff_prepare(grid, out, eps, u, ux, uxx);
  for (int j = 0; j < grid.m_interior; ++j) coeff_row(grid, u, ux, uxx, eps, j, out);
}

void assemble_coefficients_omp(const Grid2D& grid, const std::vector<double>& u,
                               const std::vector<double>& ux, const std::vector<double>& uxx,
                               double eps, TransformedCoefficients& out) {
  coeff_prepare(grid, out, eps, u, ux, uxx);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < grid.m_interior; ++j) coeff_row(grid, u, ux, uxx, eps, j, out);
}

void assemble_coefficients(const Grid2D& grid, const std::vector<double>& u,
                           const std::vector<double>& ux, const std::vector<double>& uxx,
                           double eps, TransformedCoefficients& out) {
  if (backend() == Backend::OpenMP)
    assemble_coefficients_omp(grid, u, ux, uxx, eps, out);
  else
    assemble_coefficients_serial(grid, u, ux, uxx, eps, out);
}

// ---------------------------------------------------------------------------
// 9-point residual
// ---------------------------------------------------------------------------

namespace {

inline void residual_row(const Grid2D& grid, const TransformedCoefficients& co,
                         const std::vector<double>& phi, const std::vector<double>& f, int j,
                         std::vector<double>& r) {
  const int n = grid.gx.n_interior;
  const double h = grid.gx.h;
  const double k = grid.k;
  const double ih2 = 1.0 / (h * h);
  const double ik2 = 1.0 / (k * k);
  const double ihk4 = 1.0 / (4.0 * h * k);
  const double ik_half = 1.0 / (2.0 * k);
  for (int i = 1; i <= n; ++i) {
    const std::size_t id = co.idx(i - 1, j - 1);
    const double pcc = phi[grid.node(i, j)];
    const double pxx = (phi[grid.node(i - 1, j)] - 2.0 * pcc + phi[grid.node(i + 1, j)]) * ih2;
    const double pee = (phi[grid.node(i, j - 1)] - 2.0 * pcc + phi[grid.node(i, j + 1)]) * ik2;
    const double pxe = (phi[grid.node(i + 1, j + 1)] - phi[grid.node(i + 1, j - 1)] -
                        phi[grid.node(i - 1, j + 1)] + phi[grid.node(i - 1, j - 1)]) * ihk4;
    const double pe = (phi[grid.node(i, j + 1)] - phi[grid.node(i, j - 1)]) * ik_half;
    double v = co.a[id] * pxx + co.b[id] * pxe + co.c[id] * pee + co.d[id] * pe;
    if (!f.empty()) v -= f[id];
    r[id] = v;
  }
}

}  // namespace

void stencil_residual_serial(const Grid2D& grid, const TransformedCoefficients& co,
                             const std::vector<double>& phi_full, const std::vector<double>& forcing,
                             std::vector<double>& r) {
  r.resize(static_cast<std::size_t>(co.n) * co.m);
  for (int j = 1; j <= grid.m_interior; ++j) residual_row(grid, co, phi_full, forcing, j, r);
}

void stencil_residual_omp(const Grid2D& grid, const TransformedCoefficients& co,
                          const std::vector<double>& phi_full, const std::vector<double>& forcing,
                          std::vector<double>& r) {
  r.resize(static_cast<std::size_t>(co.n) * co.m);
#pragma omp parallel for schedule(static)
  for (int j = 1; j <= grid.m_interior; ++j) residual_row(grid, co, phi_full, forcing, j, r);
}

void stencil_residual(const Grid2D& grid, const TransformedCoefficients& co,
                      const std::vector<double>& phi_full, const std::vector<double>& forcing,
                      std::vector<double>& r) {
  if (backend() == Backend::OpenMP)
    stencil_residual_omp(grid, co, phi_full, forcing, r);
  else
    stencil_residual_serial(grid, co, phi_full, forcing, r);
}

// ---------------------------------------------------------------------------
// energy quadratures
// ---------------------------------------------------------------------------

namespace {

// nodal u / u_x with wall values; clamped walls carry u = u_x = 0
inline double u_at(const std::vector<double>& u, int i, int n) {
  return (i >= 1 && i <= n) ? u[i - 1] : 0.0;
}

inline double trap_row_sum(const Grid2D& grid, const std::vector<double>& phi,
                           const std::vector<double>& u, const std::vector<double>& ux, double eps,
                           int j) {
  const int n = grid.gx.n_interior;
  const int m = grid.m_interior;
  const double h = grid.gx.h;
  const double k = grid.k;
  const double eta = grid.eta_of(j);
  const double e2 = eps * eps;
  double row = 0.0;
  for (int i = 0; i <= n + 1; ++i) {
    double px, pe;
    if (i == 0)
      px = (-3.0 * phi[grid.node(0, j)] + 4.0 * phi[grid.node(1, j)] - phi[grid.node(2, j)]) / (2.0 * h);
    else if (i == n + 1)
      px = (3.0 * phi[grid.node(n + 1, j)] - 4.0 * phi[grid.node(n, j)] + phi[grid.node(n - 1, j)]) / (2.0 * h);
    else
      px = (phi[grid.node(i + 1, j)] - phi[grid.node(i - 1, j)]) / (2.0 * h);
    if (j == 0)
      pe = (-3.0 * phi[grid.node(i, 0)] + 4.0 * phi[grid.node(i, 1)] - phi[grid.node(i, 2)]) / (2.0 * k);
    else if (j == m + 1)
      pe = (3.0 * phi[grid.node(i, m + 1)] - 4.0 * phi[grid.node(i, m)] + phi[grid.node(i, m - 1)]) / (2.0 * k);
    else
      pe = (phi[grid.node(i, j + 1)] - phi[grid.node(i, j - 1)]) / (2.0 * k);
    const double gap = 1.0 + u_at(u, i, n);
    const double uxi = u_at(ux, i, n);
    const double psix = px - eta * uxi * pe / gap;
    const double integrand = (e2 * psix * psix + pe * pe / (gap * gap)) * gap;
    const double wi = (i == 0 || i == n + 1) ? 0.5 : 1.0;
    row += wi * integrand;
  }
  return row * h;
}

double trap_total(const Grid2D& grid, const std::vector<double>& rowsum) {
  const int m = grid.m_interior;
  double total = 0.0;
  for (int j = 0; j <= m + 1; ++j) {
    const double wj = (j == 0 || j == m + 1) ? 0.5 : 1.0;
    total += wj * rowsum[j];
  }
  return total * grid.k;
}

inline double mid_row_sum(const Grid2D& grid, const std::vector<double>& phi,
                          const std::vector<double>& u, const std::vector<double>& ux, double eps,
                          int j) {
  // cells between eta rows j and j+1
  const int n = grid.gx.n_interior;
  const double h = grid.gx.h;
  const double k = grid.k;
  const double eta_c = (j + 0.5) * k;
  const double e2 = eps * eps;
  double row = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double p00 = phi[grid.node(i, j)];
    const double p10 = phi[grid.node(i + 1, j)];
    const double p01 = phi[grid.node(i, j + 1)];
    const double p11 = phi[grid.node(i + 1, j + 1)];
    const double px = (p10 + p11 - p00 - p01) / (2.0 * h);
    const double pe = (p01 + p11 - p00 - p10) / (2.0 * k);
    const double gap = 1.0 + 0.5 * (u_at(u, i, n) + u_at(u, i + 1, n));
    const double uxc = 0.5 * (u_at(ux, i, n) + u_at(ux, i + 1, n));
    const double psix = px - eta_c * uxc * pe / gap;
    row += (e2 * psix * psix + pe * pe / (gap * gap)) * gap;
  }
  return row * h;
}

}  // namespace

double energy_trapezoid_serial(const Grid2D& grid, const std::vector<double>& phi_full,
                               const std::vector<double>& u, const std::vector<double>& ux,
                               double eps) {
  const int m = grid.m_interior;
  std::vector<double> rowsum(m + 2);
  for (int j = 0; j <= m + 1; ++j) rowsum[j] = trap_row_sum(grid, phi_full, u, ux, eps, j);
  return trap_total(grid, rowsum);
}

double energy_trapezoid_omp(const Grid2D& grid, const std::vector<double>& phi_full,
                            const std::vector<double>& u, const std::vector<double>& ux,
                            double eps) {
  const int m = grid.m_interior;
  std::vector<double> rowsum(m + 2);
#pragma omp parallel for schedule(static)
  for (int j = 0; j <= m + 1; ++j) rowsum[j] = trap_row_sum(grid, phi_full, u, ux, eps, j);
  return trap_total(grid, rowsum);
}

double energy_trapezoid(const Grid2D& grid, const std::vector<double>& phi_full,
                        const std::vector<double>& u, const std::vector<double>& ux, double eps) {
  return backend() == Backend::OpenMP ? energy_trapezoid_omp(grid, phi_full, u, ux, eps)
                                      : energy_trapezoid_serial(grid, phi_full, u, ux, eps);
}

double energy_midpoint_serial(const Grid2D& grid, const std::vector<double>& phi_full,
                              const std::vector<double>& u, const std::vector<double>& ux,
                              double eps) {
  const int m = grid.m_interior;
  std::vector<double> rowsum(m + 1);
  for (int j = 0; j <= m; ++j) rowsum[j] = mid_row_sum(grid, phi_full, u, ux, eps, j);
  double total = 0.0;
  for (int j = 0; j <= m; ++j) total += rowsum[j];
  return total * grid.k;
}

double energy_midpoint_omp(const Grid2D& grid, const std::vector<double>& phi_full,
                           const std::vector<double>& u, const std::vector<double>& ux, double eps) {
  const int m = grid.m_interior;
  std::vector<double> rowsum(m + 1);
#pragma omp parallel for schedule(static)
  for (int j = 0; j <= m; ++j) rowsum[j] = mid_row_sum(grid, phi_full, u, ux, eps, j);
  double total = 0.0;
  for (int j = 0; j <= m; ++j) total += rowsum[j];
  return total * grid.k;
}

double energy_midpoint(const Grid2D& grid, const std::vector<double>& phi_full,
                       const std::vector<double>& u, const std::vector<double>& ux, double eps) {
  return backend() == Backend::OpenMP ? energy_midpoint_omp(grid, phi_full, u, ux, eps)
                                      : energy_midpoint_serial(grid, phi_full, u, ux, eps);
}

// ---------------------------------------------------------------------------
// discrete H^2 norm
// ---------------------------------------------------------------------------

namespace {

inline double h2_row_sum(const Grid2D& grid, const std::vector<double>& w, int j) {
  const int n = grid.gx.n_interior;
  const int m = grid.m_interior;
  const double h = grid.gx.h;
  const double k = grid.k;
  double row = 0.0;
  for (int i = 0; i <= n + 1; ++i) {
    const double wc = w[grid.node(i, j)];
    const double wi = (i == 0 || i == n + 1) ? 0.5 : 1.0;
    double s = wc * wc;
    if (i >= 1 && i <= n) {
      const double dx = (w[grid.node(i + 1, j)] - w[grid.node(i - 1, j)]) / (2.0 * h);
      const double dxx = (w[grid.node(i + 1, j)] - 2.0 * wc + w[grid.node(i - 1, j)]) / (h * h);
      s += dx * dx + dxx * dxx;
    }
    if (j >= 1 && j <= m) {
      const double de = (w[grid.node(i, j + 1)] - w[grid.node(i, j - 1)]) / (2.0 * k);
      const double dee = (w[grid.node(i, j + 1)] - 2.0 * wc + w[grid.node(i, j - 1)]) / (k * k);
      s += de * de + dee * dee;
    }
    if (i >= 1 && i <= n && j >= 1 && j <= m) {
      const double dxe = (w[grid.node(i + 1, j + 1)] - w[grid.node(i + 1, j - 1)] -
                          w[grid.node(i - 1, j + 1)] + w[grid.node(i - 1, j - 1)]) / (4.0 * h * k);
      s += dxe * dxe;
    }
    row += wi * s;
  }
  return row * h;
}

}  // namespace

double h2_norm_sq_serial(const Grid2D& grid, const std::vector<double>& w_full) {
  const int m = grid.m_interior;
  std::vector<double> rowsum(m + 2);
  for (int j = 0; j <= m + 1; ++j) rowsum[j] = h2_row_sum(grid, w_full, j);
  return trap_total(grid, rowsum);
}

double h2_norm_sq_omp(const Grid2D& grid, const std::vector<double>& w_full) {
  const int m = grid.m_interior;
  std::vector<double> rowsum(m + 2);
#pragma omp parallel for schedule(static)
  for (int j = 0; j <= m + 1; ++j) rowsum[j] = h2_row_sum(grid, w_full, j);
  return trap_total(grid, rowsum);
}

double h2_norm_sq(const Grid2D& grid, const std::vector<double>& w_full) {
  return backend() == Backend::OpenMP ? h2_norm_sq_omp(grid, w_full)
                                      : h2_norm_sq_serial(grid, w_full);
}

// ---------------------------------------------------------------------------
// spectral transform
// ---------------------------------------------------------------------------

void spectral_transform_serial(const double* q_colmajor, int n, const double* z, double* out) {
  for (int r = 0; r < n; ++r) {
    const double* col = q_colmajor + static_cast<std::size_t>(r) * n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += col[i] * z[i];
    out[r] = s;
  }
}

void spectral_transform_omp(const double* q_colmajor, int n, const double* z, double* out) {
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n; ++r) {
    const double* col = q_colmajor + static_cast<std::size_t>(r) * n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += col[i] * z[i];
    out[r] = s;
  }
}

void spectral_transform(const double* q_colmajor, int n, const double* z, double* out) {
  if (backend() == Backend::OpenMP)
    spectral_transform_omp(q_colmajor, n, z, out);
  else
    spectral_transform_serial(q_colmajor, n, z, out);
}

}  // namespace mems::kernels
