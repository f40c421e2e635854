#include <doctest.h>

#include <fstream>
#include <sstream>

#include "ctql/cli.hpp"
#include "ctql/config.hpp"
#include "ctql/hjb.hpp"
#include "ctql/qnet.hpp"
#include "test_util.hpp"

using namespace ctql;

namespace {

struct RunCapture {
  int code = 0;
  std::string out, err;
};

RunCapture run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  RunCapture r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("train smoke run writes the expected artifacts") {
  testutil::TempDir tmp("cli_train");
  RunCapture r = run_cli({"train", "--set", "preset=lqr1d", "--set", "N=10", "--set",
                          "eval_every=5", "--set", "hidden=8,8", "--set", "eval_T=1",
                          "--set", "bellman_probes=2", "--seed", "3", "--out-dir", tmp.path()});
  INFO(r.err);
  CHECK(r.code == cli::kExitOk);

  const std::string curve = testutil::read_file(tmp.path("curve.csv"));
  CHECK(curve.rfind("iter,loss,eval_cost,bellman_residual\n", 0) == 0);
  CHECK(count_lines(curve) >= 2);  // header + at least one evaluation row

  CHECK_NOTHROW(load_checkpoint(tmp.path("checkpoint_final.json")));
  const std::string manifest = testutil::read_file(tmp.path("manifest.json"));
  CHECK(manifest.find("\"fingerprint\"") != std::string::npos);
  CHECK(manifest.find("curve.csv") != std::string::npos);
}

TEST_CASE("unknown config keys name the offender and exit 2") {
  testutil::TempDir tmp("cli_badkey");
  RunCapture r = run_cli({"train", "--set", "gama=0.1", "--out-dir", tmp.path()});
  CHECK(r.code == cli::kExitConfig);
  CHECK(r.err.find("gama") != std::string::npos);
}

TEST_CASE("identical configs produce byte-identical curves and fingerprints") {
  testutil::TempDir a("cli_det_a");
  testutil::TempDir b("cli_det_b");
  const std::vector<std::string> common = {
      "train", "--set", "preset=lqr1d", "--set", "N=8",    "--set", "eval_every=4",
      "--set", "hidden=8,8", "--set", "eval_T=1", "--set", "bellman_probes=2",
      "--seed", "11"};
  auto with_dir = [&](const std::string& dir) {
    std::vector<std::string> args = common;
    args.push_back("--out-dir");
    args.push_back(dir);
    return args;
  };
  RunCapture ra = run_cli(with_dir(a.path()));
  RunCapture rb = run_cli(with_dir(b.path()));
  REQUIRE(ra.code == cli::kExitOk);
  REQUIRE(rb.code == cli::kExitOk);
  CHECK(testutil::read_file(a.path("curve.csv")) == testutil::read_file(b.path("curve.csv")));
  CHECK(testutil::read_file(a.path("checkpoint_final.json")) ==
        testutil::read_file(b.path("checkpoint_final.json")));
  // The stdout fingerprint lines agree as well.
  CHECK(ra.out.substr(0, ra.out.find('\n')) == rb.out.substr(0, rb.out.find('\n')));
}

TEST_CASE("fingerprints are stable under key reordering") {
  Config c1 = Config::from_string("a=1\nb=2\n");
  Config c2 = Config::from_string("b=2\na=1\n");
  CHECK(c1.fingerprint() == c2.fingerprint());
  Config c3 = Config::from_string("a=1\nb=3\n");
  CHECK(c1.fingerprint() != c3.fingerprint());
}

TEST_CASE("eval: zero checkpoint on the zero-cost system costs nothing") {
  testutil::TempDir tmp("cli_eval");
  NetworkInit init = init_params(1, 1, 0, {8});
  for (Layer& l : init.params.layers) {
    std::fill(l.W.data.begin(), l.W.data.end(), 0.0);
    std::fill(l.b.begin(), l.b.end(), 0.0);
  }
  init.target.net = init.params;
  save_checkpoint(tmp.path("zero.json"), init.params, init.target, init.adam, "");

  RunCapture r = run_cli({"eval", "--checkpoint", tmp.path("zero.json"), "--set",
                          "cost_scale=0", "--x0", "1", "--u0", "1", "--T", "2",
                          "--out-dir", tmp.path()});
  INFO(r.err);
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("eval_cost=0\n") != std::string::npos);

  const std::string traj = testutil::read_file(tmp.path("trajectory.csv"));
  CHECK(traj.rfind("t,x_0,u_0,a_0\n", 0) == 0);
}

TEST_CASE("eval: checkpoint/environment shape mismatch exits 3") {
  testutil::TempDir tmp("cli_eval_bad");
  NetworkInit init = init_params(1, 1, 0, {8});
  save_checkpoint(tmp.path("one.json"), init.params, init.target, init.adam, "");
  RunCapture r = run_cli({"eval", "--checkpoint", tmp.path("one.json"), "--set",
                          "preset=lqr_random", "--set", "n=10", "--set", "m=10",
                          "--out-dir", tmp.path()});
  CHECK(r.code == cli::kExitArtifact);
}

TEST_CASE("solve-hjb: the zero-cost system converges immediately") {
  testutil::TempDir tmp("cli_solve");
  RunCapture r = run_cli({"solve-hjb", "--set", "preset=lqr1d", "--set", "cost_scale=0",
                          "--set", "grid_points=11", "--set", "tol=1e-10", "--out-dir",
                          tmp.path(), "--name", "zero"});
  INFO(r.err);
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("converged=true") != std::string::npos);

  GridSolution sol = load_grid_solution(tmp.path("zero.json"));
  CHECK(sol.meta.iterations <= 2);
  for (double v : sol.values) CHECK(v == 0.0);

  const std::string log = testutil::read_file(tmp.path("zero.convergence.csv"));
  CHECK(log.rfind("iteration,sup_update\n", 0) == 0);
}

TEST_CASE("solve-hjb: finite mode writes all time slices") {
  testutil::TempDir tmp("cli_finite");
  RunCapture r = run_cli({"solve-hjb", "--mode", "finite", "--set", "preset=lqr1d", "--set",
                          "grid_points=11", "--set", "horizon_T=0.5", "--set", "time_steps=5",
                          "--out-dir", tmp.path(), "--name", "fh"});
  INFO(r.err);
  CHECK(r.code == cli::kExitOk);
  GridSolution sol = load_grid_solution(tmp.path("fh.json"));
  CHECK(sol.time_slices == 6);
  CHECK(sol.meta.horizon_T == 0.5);
  // Terminal slice is the quadratic terminal cost at the grid nodes.
  const long nodes = sol.grid.node_count();
  for (long node = 0; node < nodes; ++node) {
    const auto coords = sol.grid.node_coords(node);
    CHECK(sol.slice(5)[node] == coords[0] * coords[0]);
  }
}

TEST_CASE("train: random preset is reproducible across runs") {
  testutil::TempDir a("cli_rnd_a");
  testutil::TempDir b("cli_rnd_b");
  const std::vector<std::string> common = {
      "train", "--set", "preset=lqr_random", "--set", "n=3",    "--set", "m=3",
      "--set", "N=5",   "--set", "hidden=8,8", "--set", "eval_every=5",
      "--set", "eval_T=0.5", "--set", "bellman_probes=2", "--seed", "9"};
  auto with_dir = [&](const std::string& dir) {
    std::vector<std::string> args = common;
    args.push_back("--out-dir");
    args.push_back(dir);
    return args;
  };
  RunCapture ra = run_cli(with_dir(a.path()));
  RunCapture rb = run_cli(with_dir(b.path()));
  INFO(ra.err);
  REQUIRE(ra.code == cli::kExitOk);
  REQUIRE(rb.code == cli::kExitOk);
  CHECK(ra.out.substr(0, ra.out.find('\n')) == rb.out.substr(0, rb.out.find('\n')));  // fingerprint
  CHECK(testutil::read_file(a.path("curve.csv")) == testutil::read_file(b.path("curve.csv")));
}

TEST_CASE("solve-hjb: capacity refusal for n + m = 6") {
  testutil::TempDir tmp("cli_cap");
  RunCapture r = run_cli({"solve-hjb", "--set", "preset=lqr_random", "--set", "n=3", "--set",
                          "m=3", "--out-dir", tmp.path()});
  CHECK(r.code == cli::kExitConfig);
  CHECK(r.err.find("capacity") != std::string::npos);
}

TEST_CASE("solve-hjb: non-convergence still writes the partial solution") {
  testutil::TempDir tmp("cli_nc");
  RunCapture r = run_cli({"solve-hjb", "--set", "preset=lqr1d", "--set", "grid_points=15",
                          "--set", "tol=1e-13", "--set", "max_iter=3", "--out-dir", tmp.path(),
                          "--name", "part"});
  CHECK(r.code == cli::kExitDivergence);
  CHECK(r.out.find("converged=false") != std::string::npos);
  GridSolution sol = load_grid_solution(tmp.path("part.json"));
  CHECK_FALSE(sol.meta.converged);
}

TEST_CASE("compare: a constant checkpoint against a matching constant oracle") {
  testutil::TempDir tmp("cli_cmp");

  // Solve the zero-cost system (Q = 0) and compare a zero network against it.
  RunCapture solve = run_cli({"solve-hjb", "--set", "preset=lqr1d", "--set", "cost_scale=0",
                              "--set", "grid_points=11", "--out-dir", tmp.path(), "--name",
                              "oracle"});
  REQUIRE(solve.code == cli::kExitOk);

  NetworkInit init = init_params(1, 1, 0, {8});
  for (Layer& l : init.params.layers) {
    std::fill(l.W.data.begin(), l.W.data.end(), 0.0);
    std::fill(l.b.begin(), l.b.end(), 0.0);
  }
  save_checkpoint(tmp.path("zero.json"), init.params, init.target, init.adam, "");

  RunCapture r = run_cli({"compare", "--checkpoint", tmp.path("zero.json"), "--solution",
                          tmp.path("oracle.json"), "--set", "preset=lqr1d", "--probes", "9",
                          "--out-dir", tmp.path()});
  INFO(r.err);
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("mean_abs_err=0\n") != std::string::npos);
  CHECK(r.out.find("max_abs_err=0\n") != std::string::npos);

  const std::string csv = testutil::read_file(tmp.path("compare.csv"));
  CHECK(csv.rfind("x_0,u_0,q_learned,q_oracle,abs_err,policy_match\n", 0) == 0);
}

TEST_CASE("compare: probes respect the inner fraction") {
  testutil::TempDir tmp("cli_cmp_inner");
  RunCapture solve = run_cli({"solve-hjb", "--set", "preset=lqr1d", "--set", "cost_scale=0",
                              "--set", "grid_points=11", "--out-dir", tmp.path(), "--name",
                              "oracle"});
  REQUIRE(solve.code == cli::kExitOk);
  NetworkInit init = init_params(1, 1, 0, {8});
  save_checkpoint(tmp.path("ck.json"), init.params, init.target, init.adam, "");

  RunCapture r = run_cli({"compare", "--checkpoint", tmp.path("ck.json"), "--solution",
                          tmp.path("oracle.json"), "--inner", "0.6", "--probes", "7",
                          "--out-dir", tmp.path()});
  REQUIRE(r.code == cli::kExitOk);

  // Grid box is [-2, 2]^2 (default scale 2); the central 60% is [-1.2, 1.2].
  std::istringstream csv(testutil::read_file(tmp.path("compare.csv")));
  std::string line;
  std::getline(csv, line);  // header
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string field;
    for (int c = 0; c < 2; ++c) {
      std::getline(row, field, ',');
      const double v = std::stod(field);
      CHECK(v >= -1.2 - 1e-12);
      CHECK(v <= 1.2 + 1e-12);
    }
  }
}

TEST_CASE("config file parsing with comments and overrides") {
  testutil::TempDir tmp("cli_cfgfile");
  std::ofstream(tmp.path("run.cfg")) << "# smoke config\npreset=lqr1d\nN=6\nhidden=8,8\n"
                                     << "eval_every=3\neval_T=1\nbellman_probes=2\n";
  RunCapture r = run_cli({"train", "--config", tmp.path("run.cfg"), "--set", "N=4", "--seed",
                          "5", "--out-dir", tmp.path()});
  INFO(r.err);
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("iterations=4\n") != std::string::npos);
}

TEST_CASE("missing config file exits with the artifact code") {
  RunCapture r = run_cli({"train", "--config", "/nonexistent/nope.cfg"});
  CHECK(r.code == cli::kExitArtifact);
}

TEST_CASE("help succeeds") {
  RunCapture r = run_cli({"--help"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("train") != std::string::npos);
}
