#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mems/grid.hpp"
#include "mems/params.hpp"
#include "mems/spectral.hpp"

namespace mems {

// Initial data specification: zero | eigenmode:<c> | bump:<a> | file:<path>
// (c e_1 for the principal eigenmode, a (1-x^2)^2 for the polynomial bump,
// one value per line for files).
struct InitialSpec {
  enum class Kind { Zero, Eigenmode, Bump, File };
  Kind kind = Kind::Zero;
  double scale = 0.0;
  std::string path;
};

std::vector<double> make_initial(const InitialSpec& spec, const Grid1D& grid,
                                 const FractionalNormContext& ctx);

// Flat key = value run configuration ('#' comments).  Unknown and duplicate
// keys are rejected; all physical parameters are validated through
// ModelParams.  Numbers serialize with 17 significant digits.
struct RunConfig {
  ModelParams model;
  InitialSpec u0;
  InitialSpec u1;

  std::vector<double> gamma_list;  // limit-study sweep, positive descending
  double xi = -1.0;                // limit-study norm index; < 0 means alpha/2

  double lambda_lo = 0.0;  // pull-in bisection
  double lambda_hi = 0.0;
  double horizon = 1.0;
  double bisect_tol = 1e-2;

  double lambda_start = 0.25;  // continuation
  double lambda_step = 0.25;
  bool arclength = true;
  bool eps_compare = false;
  int max_branch_points = 400;

  std::uint64_t seed = 20240901;
  int c3_samples = 200;
  std::string output_dir = "out";

  double xi_or_default() const { return xi > 0.0 ? xi : 0.5 * model.alpha(); }

  void validate() const;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_string(const std::string& text);
  std::string serialize() const;
};

// 17-significant-digit formatting used by every emitted number ('.' decimal
// separator independent of locale).
std::string format_double(double v);

}  // namespace mems
