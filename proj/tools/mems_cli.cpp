#include <CLI11.hpp>

#include <clocale>
#include <iostream>
#include <string>

#include "mems/experiments.hpp"
#include "mems/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

mems::RunConfig load_config(const std::string& path, int stride_override) {
  mems::RunConfig cfg =
      path.empty() ? mems::RunConfig{} : mems::RunConfig::from_file(path);
  if (stride_override > 0) cfg.model.stride = stride_override;
  cfg.validate();
  return cfg;
}

void apply_jobs(int jobs) {
  if (jobs == 1) {
    mems::kernels::set_backend(mems::kernels::Backend::Serial);
  } else if (jobs > 1) {
#ifdef _OPENMP
    omp_set_num_threads(jobs);
#endif
    mems::kernels::set_backend(mems::kernels::Backend::OpenMP);
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_NUMERIC, "C");

  CLI::App app{"Free-boundary MEMS plate simulator: damped wave / parabolic dynamics,"
               " steady-state continuation, decay certification and the gamma^2 -> 0 limit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  int jobs = 0;
  int stride = 0;
  app.add_option("--config", config_path, "flat key = value configuration file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--jobs", jobs, "worker threads (1 forces the serial backend)");
  app.add_option("--stride", stride, "ledger/snapshot stride override");

  auto* simulate = app.add_subcommand("simulate", "integrate one trajectory, emit CSV + summary");
  auto* limit = app.add_subcommand("limit-study", "gamma sweep against the gamma = 0 reference");
  auto* continuation = app.add_subcommand("continuation", "steady-state branch and fold estimate");
  auto* pullin = app.add_subcommand("pull-in", "bisect the dynamic touchdown threshold");
  auto* decay = app.add_subcommand("decay", "Lyapunov decay certification report");
  auto* verify = app.add_subcommand("verify", "run the built-in check suite");
  std::string level = "quick";
  verify->add_option("--level", level, "quick|full")->capture_default_str();
  for (CLI::App* sub : {simulate, limit, continuation, pullin, decay, verify}) {
    sub->fallthrough();  // accept the global --config/--out/--jobs after the subcommand
  }

  CLI11_PARSE(app, argc, argv);
  apply_jobs(jobs);

  try {
    if (verify->parsed()) return mems::cmd_verify(level);
    const mems::RunConfig cfg = load_config(config_path, stride);
    if (simulate->parsed()) return mems::cmd_simulate(cfg, out_dir);
    if (limit->parsed()) return mems::cmd_limit_study(cfg, out_dir);
    if (continuation->parsed()) return mems::cmd_continuation(cfg, out_dir);
    if (pullin->parsed()) return mems::cmd_pull_in(cfg, out_dir);
    if (decay->parsed()) return mems::cmd_decay(cfg, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
