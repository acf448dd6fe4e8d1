#pragma once

#include <string>

#include "mems/config.hpp"
#include "mems/dynamics.hpp"
#include "mems/nonlinearity.hpp"
#include "mems/plate_operator.hpp"
#include "mems/spectral.hpp"

namespace mems {

// Grids, operator and spectral context for one parameter set; the expensive
// eigendecomposition happens once here.
struct Workspace {
  Grid1D grid1;
  Grid2D grid2;
  PlateOperator op;
  FractionalNormContext ctx;

  explicit Workspace(const ModelParams& p)
      : grid1(Grid1D::make(p.n_interior)),
        grid2(Grid2D::make(grid1, p.m_interior)),
        op(grid1, p.beta, p.tau),
        ctx(op, p.alpha(), p.tol_linear) {}
};

// Experiment drivers behind the CLI subcommands.  Each writes its files
// under out_dir (created if missing) and returns a process exit code.
int cmd_simulate(const RunConfig& cfg, const std::string& out_dir);
int cmd_limit_study(const RunConfig& cfg, const std::string& out_dir);
int cmd_continuation(const RunConfig& cfg, const std::string& out_dir);
int cmd_pull_in(const RunConfig& cfg, const std::string& out_dir);
int cmd_decay(const RunConfig& cfg, const std::string& out_dir);

// Self-check suite: `quick` runs the closed-form identities, `full` adds the
// manufactured-solution and time-integration convergence studies.
int cmd_verify(const std::string& level);

}  // namespace mems
