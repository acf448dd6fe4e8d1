#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mems/csv.hpp"
#include "mems/experiments.hpp"

using namespace mems;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("config: parsing, defaults, comments") {
  const RunConfig cfg = RunConfig::from_string(
      "# comment line\n"
      "gamma = 0.25   # trailing comment\n"
      "lambda = 1.5\n"
      "n_interior = 63\n"
      "initial_condition = bump:-0.1\n"
      "initial_velocity = eigenmode:0.5\n"
      "gamma_list = 0.4, 0.2, 0.1\n");
  CHECK(cfg.model.gamma == 0.25);
  CHECK(cfg.model.lambda == 1.5);
  CHECK(cfg.model.n_interior == 63);
  CHECK(cfg.model.beta == 1.0);  // untouched default
  CHECK(cfg.u0.kind == InitialSpec::Kind::Bump);
  CHECK(cfg.u0.scale == -0.1);
  CHECK(cfg.u1.kind == InitialSpec::Kind::Eigenmode);
  CHECK(cfg.gamma_list.size() == 3);
}

TEST_CASE("config: rejection diagnostics carry the line and key") {
  CHECK_THROWS_WITH_AS(RunConfig::from_string("gamma = 0.1\nbogus = 2\n"),
                       doctest::Contains("line 2"), ParameterError);
  CHECK_THROWS_WITH_AS(RunConfig::from_string("gamma = 0.1\nbogus = 2\n"),
                       doctest::Contains("bogus"), ParameterError);
  CHECK_THROWS_AS(RunConfig::from_string("gamma = 0.1\ngamma = 0.2\n"), ParameterError);
  CHECK_THROWS_AS(RunConfig::from_string("gamma = abc\n"), ParameterError);
  CHECK_THROWS_AS(RunConfig::from_string("initial_condition = wiggle:3\n"), ParameterError);
  CHECK_THROWS_AS(RunConfig::from_string("gamma_list = 0.1, 0.2\n"), ParameterError);  // ascending
  CHECK_THROWS_AS(RunConfig::from_string("kappa = 1.5\n"), ParameterError);
  CHECK_THROWS_AS(RunConfig::from_string("xi = 0.4\n"), ParameterError);  // >= alpha
}

TEST_CASE("config: serialize/parse round trip is lossless") {
  RunConfig cfg;
  cfg.model.gamma = 0.1 + 1e-17;
  cfg.model.lambda = 4.0 / 3.0;
  cfg.model.dt = 1e-3;
  cfg.gamma_list = {0.4, 0.2, 0.1};
  cfg.u0 = {InitialSpec::Kind::Bump, -0.123456789012345678, ""};
  const RunConfig back = RunConfig::from_string(cfg.serialize());
  CHECK(back.model.gamma == cfg.model.gamma);
  CHECK(back.model.lambda == cfg.model.lambda);
  CHECK(back.model.dt == cfg.model.dt);
  CHECK(back.u0.scale == cfg.u0.scale);
  CHECK(back.gamma_list == cfg.gamma_list);
}

TEST_CASE("initial data builders") {
  ModelParams p;
  p.n_interior = 31;
  p.m_interior = 7;
  Workspace ws(p);
  const std::vector<double> z = make_initial({InitialSpec::Kind::Zero, 0.0, ""}, ws.grid1, ws.ctx);
  for (double v : z) CHECK(v == 0.0);

  const std::vector<double> e = make_initial({InitialSpec::Kind::Eigenmode, 2.0, ""}, ws.grid1, ws.ctx);
  CHECK(ws.ctx.norm(e, 0.0) == doctest::Approx(2.0).epsilon(1e-12));

  const std::vector<double> b = make_initial({InitialSpec::Kind::Bump, -0.5, ""}, ws.grid1, ws.ctx);
  CHECK(*std::min_element(b.begin(), b.end()) == doctest::Approx(-0.5).epsilon(1e-2));

  TempDir tmp("mems_ic_test");
  const std::string icpath = tmp.str() + "/ic.txt";
  {
    std::ofstream out(icpath);
    for (int i = 0; i < 31; ++i) out << format_double(0.01 * i) << "\n";
  }
  const std::vector<double> ff = make_initial({InitialSpec::Kind::File, 0.0, icpath}, ws.grid1, ws.ctx);
  CHECK(ff[10] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK_THROWS_AS(make_initial({InitialSpec::Kind::File, 0.0, "/nonexistent"}, ws.grid1, ws.ctx),
                  ArgumentError);
}

TEST_CASE("csv round trip keeps doubles bit-exact") {
  TempDir tmp("mems_csv_test");
  const std::string path = tmp.str() + "/t.csv";
  {
    csv::Writer w(path, {"a", "b"});
    w.row({csv::Writer::num(1.0 / 3.0), csv::Writer::num(-2.5e-17)});
  }
  const csv::Table t = csv::read(path);
  REQUIRE(t.columns.size() == 2);
  REQUIRE(t.rows.size() == 1);
  CHECK(std::stod(t.rows[0][0]) == 1.0 / 3.0);
  CHECK(std::stod(t.rows[0][1]) == -2.5e-17);
}

TEST_CASE("simulate: zero run emits all-zero residual column and summary") {
  TempDir tmp("mems_sim_zero");
  RunConfig cfg;
  cfg.model.n_interior = 31;
  cfg.model.m_interior = 7;
  cfg.model.lambda = 0.0;
  cfg.model.gamma = 0.2;
  cfg.model.dt = 1e-2;
  cfg.model.t_end = 0.2;
  cfg.model.stride = 2;
  CHECK(cmd_simulate(cfg, tmp.str()) == 0);
  const csv::Table traj = csv::read(tmp.str() + "/trajectory.csv");
  CHECK(traj.columns == std::vector<std::string>{"t", "min_gap", "sup_u", "norm_H2", "g_sup",
                                                 "in_S_alpha"});
  const csv::Table ledger = csv::read(tmp.str() + "/ledger.csv");
  for (const auto& row : ledger.rows) CHECK(std::stod(row[5]) == 0.0);
  CHECK(fs::exists(tmp.str() + "/summary.json"));
}

TEST_CASE("simulate: stride doubling halves the ledger row count") {
  RunConfig cfg;
  cfg.model.n_interior = 31;
  cfg.model.m_interior = 7;
  cfg.model.lambda = 0.0;
  cfg.model.gamma = 0.2;
  cfg.model.dt = 1e-3;
  cfg.model.t_end = 0.2;  // 200 steps
  std::size_t rows[2];
  int idx = 0;
  for (int stride : {5, 10}) {
    TempDir tmp("mems_sim_stride" + std::to_string(stride));
    cfg.model.stride = stride;
    cmd_simulate(cfg, tmp.str());
    rows[idx++] = csv::read(tmp.str() + "/ledger.csv").rows.size();
  }
  CHECK(rows[0] == 41);  // 200/5 + initial row
  CHECK(rows[1] == 21);
}

TEST_CASE("determinism: identical config gives byte-identical outputs") {
  RunConfig cfg;
  cfg.model.n_interior = 31;
  cfg.model.m_interior = 7;
  cfg.model.lambda = 0.8;
  cfg.model.eps = 0.3;
  cfg.model.gamma = 0.2;
  cfg.model.dt = 1e-3;
  cfg.model.t_end = 0.05;
  cfg.model.stride = 5;
  cfg.u0 = {InitialSpec::Kind::Bump, -0.05, ""};
  TempDir a("mems_det_a"), b("mems_det_b");
  cmd_simulate(cfg, a.str());
  cmd_simulate(cfg, b.str());
  CHECK(slurp(a.str() + "/trajectory.csv") == slurp(b.str() + "/trajectory.csv"));
  CHECK(slurp(a.str() + "/ledger.csv") == slurp(b.str() + "/ledger.csv"));
}

TEST_CASE("limit study: unforced zero data gives exactly zero errors") {
  TempDir tmp("mems_limit_zero");
  RunConfig cfg;
  cfg.model.n_interior = 31;
  cfg.model.m_interior = 7;
  cfg.model.lambda = 0.0;
  cfg.model.dt = 1e-3;
  cfg.model.t_end = 0.05;
  cfg.model.stride = 10;
  cfg.gamma_list = {0.2, 0.1};
  CHECK(cmd_limit_study(cfg, tmp.str()) == 0);
  const csv::Table t = csv::read(tmp.str() + "/limit_study.csv");
  for (const auto& row : t.rows) {
    CHECK(std::stod(row[1]) == 0.0);  // err_u
    CHECK(std::stod(row[3]) == 0.0);  // err_potential
  }
}

TEST_CASE("decay command report echoes the constants and passes") {
  TempDir tmp("mems_decay_cmd");
  RunConfig cfg;
  cfg.model.n_interior = 31;
  cfg.model.m_interior = 7;
  cfg.model.lambda = 0.0;
  cfg.model.gamma = 0.5;
  cfg.model.dt = 1e-3;
  cfg.model.t_end = 1.0;
  cfg.model.stride = 5;
  cfg.u1 = {InitialSpec::Kind::Eigenmode, 0.5, ""};
  cfg.c3_samples = 10;
  CHECK(cmd_decay(cfg, tmp.str()) == 0);
  const std::string rep = slurp(tmp.str() + "/decay_report.json");
  CHECK(rep.find("\"b\": 0.5") != std::string::npos);
  CHECK(rep.find("\"omega\": 0.2") != std::string::npos);
  CHECK(rep.find("surrogate") != std::string::npos);  // provenance block
  CHECK(rep.find("t_hat") != std::string::npos);
}

TEST_CASE("limit study aborts naming the offending gamma on early termination") {
  TempDir tmp("mems_limit_abort");
  RunConfig cfg;
  cfg.model.n_interior = 31;
  cfg.model.m_interior = 7;
  cfg.model.lambda = 50.0;  // touches down well before t_end
  cfg.model.eps = 0.0;
  cfg.model.closed_form_g = true;
  cfg.model.dt = 1e-4;
  cfg.model.t_end = 0.5;
  cfg.gamma_list = {0.2, 0.1};
  CHECK_THROWS_WITH_AS(cmd_limit_study(cfg, tmp.str()), doctest::Contains("gamma"),
                       NumericalError);
}

TEST_CASE("continuation reports the pull-in interval when requested") {
  TempDir tmp("mems_cont_pullin");
  RunConfig cfg;
  cfg.model.n_interior = 31;
  cfg.model.m_interior = 7;
  cfg.model.closed_form_g = true;
  cfg.model.gamma = 0.0;
  cfg.model.dt = 2e-4;
  cfg.lambda_start = 0.5;
  cfg.lambda_step = 0.5;
  cfg.arclength = false;
  cfg.max_branch_points = 30;
  cfg.lambda_lo = 0.0;
  cfg.lambda_hi = 50.0;
  cfg.horizon = 0.3;
  cfg.bisect_tol = 5.0;
  CHECK(cmd_continuation(cfg, tmp.str()) == 0);
  std::ifstream in(tmp.path / "fold_summary.json");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().find("pull_in") != std::string::npos);
  CHECK(ss.str().find("lambda_s_h") != std::string::npos);
}

TEST_CASE("continuation command: branch csv parses back losslessly") {
  TempDir tmp("mems_cont");
  RunConfig cfg;
  cfg.model.n_interior = 31;
  cfg.model.m_interior = 7;
  cfg.model.closed_form_g = true;
  cfg.lambda_start = 0.5;
  cfg.lambda_step = 0.5;
  cfg.max_branch_points = 40;
  CHECK(cmd_continuation(cfg, tmp.str()) == 0);
  const csv::Table t = csv::read(tmp.str() + "/branch.csv");
  CHECK(t.columns == std::vector<std::string>{"s", "lambda", "min_gap", "sup_norm", "stability",
                                              "residual"});
  REQUIRE(t.rows.size() >= 5);
  // lambda_max on the emitted branch > 0 and values round-trip
  double lmax = 0.0;
  for (const auto& row : t.rows) lmax = std::max(lmax, std::stod(row[1]));
  CHECK(lmax > 0.0);
  for (const auto& row : t.rows) {
    const double v = std::stod(row[1]);
    CHECK(format_double(v) == row[1]);
  }
  CHECK(fs::exists(tmp.str() + "/fold_summary.json"));
}
