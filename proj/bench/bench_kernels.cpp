// Timing comparison of the serial reference kernels against their OpenMP
// variants.  Each kernel runs enough repetitions to exceed ~50 ms per
// backend; output is a plain table of per-call times and speedups.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mems/kernels.hpp"
#include "mems/potential.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using clock_type = std::chrono::steady_clock;

double time_per_call(const std::function<void()>& fn) {
  fn();  // warm up
  int reps = 1;
  for (;;) {
    const auto t0 = clock_type::now();
    for (int r = 0; r < reps; ++r) fn();
    const double elapsed = std::chrono::duration<double>(clock_type::now() - t0).count();
    if (elapsed > 0.05 || reps > (1 << 20)) return elapsed / reps;
    reps *= 4;
  }
}

volatile double sink;

}  // namespace

int main() {
  const int n = 511, m = 255;
  const mems::Grid2D grid = mems::Grid2D::make(mems::Grid1D::make(n), m);

  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) {
    const double q = 1.0 - grid.gx.x[i] * grid.gx.x[i];
    u[i] = -0.3 * q * q;
  }
  const mems::PlateDerivatives d = mems::plate_derivatives(grid.gx, u);
  std::vector<double> phi(grid.total_nodes());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = std::sin(1e-3 * static_cast<double>(i));

  mems::TransformedCoefficients co;
  mems::kernels::assemble_coefficients_serial(grid, u, d.ux, d.uxx, 0.5, co);
  std::vector<double> res;

  const int ns = 1024;
  std::vector<double> q(static_cast<std::size_t>(ns) * ns), z(ns), out(ns);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = std::cos(1e-4 * static_cast<double>(i));
  for (int i = 0; i < ns; ++i) z[i] = std::sin(0.01 * i);

  struct Entry {
    std::string name;
    std::function<void()> serial, omp;
  };
  const std::vector<Entry> entries = {
      {"assemble_coefficients (511x255)",
       [&] { mems::kernels::assemble_coefficients_serial(grid, u, d.ux, d.uxx, 0.5, co); },
       [&] { mems::kernels::assemble_coefficients_omp(grid, u, d.ux, d.uxx, 0.5, co); }},
      {"stencil_residual (511x255)",
       [&] { mems::kernels::stencil_residual_serial(grid, co, phi, {}, res); },
       [&] { mems::kernels::stencil_residual_omp(grid, co, phi, {}, res); }},
      {"energy_trapezoid (511x255)",
       [&] { sink = mems::kernels::energy_trapezoid_serial(grid, phi, u, d.ux, 0.5); },
       [&] { sink = mems::kernels::energy_trapezoid_omp(grid, phi, u, d.ux, 0.5); }},
      {"h2_norm_sq (511x255)",
       [&] { sink = mems::kernels::h2_norm_sq_serial(grid, phi); },
       [&] { sink = mems::kernels::h2_norm_sq_omp(grid, phi); }},
      {"spectral_transform (1024)",
       [&] { mems::kernels::spectral_transform_serial(q.data(), ns, z.data(), out.data()); },
       [&] { mems::kernels::spectral_transform_omp(q.data(), ns, z.data(), out.data()); }},
  };

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (compiled without OpenMP)\n");
#endif
  std::printf("%-36s %12s %12s %9s\n", "kernel", "serial [us]", "openmp [us]", "speedup");
  for (const Entry& e : entries) {
    const double ts = time_per_call(e.serial) * 1e6;
    const double tp = time_per_call(e.omp) * 1e6;
    std::printf("%-36s %12.2f %12.2f %8.2fx\n", e.name.c_str(), ts, tp, ts / tp);
  }
  return 0;
}
