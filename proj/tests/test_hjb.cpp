#include <doctest.h>

#include <cmath>

#include "ctql/common.hpp"
#include "ctql/hjb.hpp"
#include "test_util.hpp"

using namespace ctql;

namespace {

GridSolution constant_solution(const GridSpec& grid, double c) {
  GridSolution sol;
  sol.grid = grid;
  sol.values.assign(static_cast<std::size_t>(grid.node_count()), c);
  sol.meta.delta = 0.01;
  return sol;
}

EnvironmentSpec still_plant() {  // f = 0
  EnvironmentSpec env = make_lqr_1d();
  env.B = Matrix(1, 1, 0.0);
  return env;
}

}  // namespace

TEST_CASE("rate sets") {
  ControlRateSet r1 = make_rate_set(1, 2.0);
  REQUIRE(r1.rates.size() == 3);
  CHECK(r1.rates[0][0] == -2.0);
  CHECK(r1.rates[1][0] == 0.0);
  CHECK(r1.rates[2][0] == 2.0);

  ControlRateSet r0 = make_rate_set(1, 0.0);
  REQUIRE(r0.rates.size() == 1);
  CHECK(r0.rates[0][0] == 0.0);

  ControlRateSet r2 = make_rate_set(2, 1.5, 16);
  REQUIRE(r2.rates.size() == 17);
  for (const auto& a : r2.rates) CHECK(norm2(a) <= 1.5 + 1e-12);
  CHECK(norm2(r2.rates[0]) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("interpolation identities") {
  GridSpec grid;
  grid.axes = {{0.0, 1.0, 3}, {0.0, 1.0, 3}};
  GridSolution sol = constant_solution(grid, 4.2);
  CHECK(interpolate(sol, {{0.31}, {0.77}}) == doctest::Approx(4.2).epsilon(1e-15));
  CHECK(interpolate(sol, {{5.0}, {-3.0}}) == doctest::Approx(4.2).epsilon(1e-15));  // clamped

  // Node values 0..8 row-major; node (1,2) has value 5.
  for (long i = 0; i < 9; ++i) sol.values[static_cast<std::size_t>(i)] = static_cast<double>(i);
  CHECK(interpolate(sol, {{0.5}, {1.0}}) == doctest::Approx(5.0).epsilon(1e-15));

  // Midpoint of a 1d cell with node values 0 and 1.
  GridSpec line;
  line.axes = {{0.0, 1.0, 2}};
  GridSolution lsol;
  lsol.grid = line;
  lsol.values = {0.0, 1.0};
  AugmentedState mid;
  mid.x = {0.5};
  CHECK(interpolate(lsol, mid) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("zero cost solves to the zero tensor immediately") {
  EnvironmentSpec env = make_lqr_1d();
  env.cost_scale = 0.0;
  GridSpec grid = GridSpec::box(env, 11, 1.0);
  long sweeps = 0;
  GridSolution sol = solve_infinite(env, grid, 0.0, make_rate_set(1, env.M), 1e-10, 100, nullptr,
                                    [&](long it, double) { sweeps = it; });
  for (double v : sol.values) CHECK(v == 0.0);
  CHECK(sweeps <= 2);
  CHECK(sol.meta.converged);
}

TEST_CASE("one sweep contracts arbitrary tensors by the discount factor") {
  EnvironmentSpec env = make_lqr_1d();
  GridSpec grid = GridSpec::box(env, 31, 2.0);
  SemiLagrangianOperator op =
      SemiLagrangianOperator::stationary(env, grid, 0.0, make_rate_set(1, env.M));
  RngState rng = make_rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> q1(static_cast<std::size_t>(grid.node_count()));
    std::vector<double> q2(q1.size());
    for (auto& v : q1) v = uniform(rng, -50, 50);
    for (auto& v : q2) v = uniform(rng, -50, 50);
    std::vector<double> t1, t2;
    op.apply(q1, t1);
    op.apply(q2, t2);
    double gap = 0.0, tgap = 0.0;
    for (std::size_t i = 0; i < q1.size(); ++i) {
      gap = std::max(gap, std::abs(q1[i] - q2[i]));
      tgap = std::max(tgap, std::abs(t1[i] - t2[i]));
    }
    CHECK(tgap <= op.discount() * gap * (1.0 + 1e-10));
  }
}

TEST_CASE("the sweep operator is monotone") {
  EnvironmentSpec env = make_lqr_1d();
  GridSpec grid = GridSpec::box(env, 21, 2.0);
  SemiLagrangianOperator op =
      SemiLagrangianOperator::stationary(env, grid, 0.0, make_rate_set(1, env.M));
  RngState rng = make_rng(23);
  std::vector<double> q(static_cast<std::size_t>(grid.node_count()));
  for (auto& v : q) v = uniform(rng, -10, 10);
  std::vector<double> raised = q;
  for (auto& v : raised) v += std::abs(normal(rng));
  std::vector<double> tq, traised;
  op.apply(q, tq);
  op.apply(raised, traised);
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(traised[i] >= tq[i] - 1e-12);
}

TEST_CASE("converged solutions satisfy the one-step recursion") {
  EnvironmentSpec env = make_lqr_1d();
  GridSpec grid = GridSpec::box(env, 41, 2.0);
  ControlRateSet rates = make_rate_set(1, env.M);
  GridSolution sol = solve_infinite(env, grid, 0.0, rates, 1e-8, 200000);
  SemiLagrangianOperator op =
      SemiLagrangianOperator::stationary(env, grid, sol.meta.delta, rates);
  std::vector<double> once;
  op.apply(sol.values, once);
  double residual = 0.0;
  for (std::size_t i = 0; i < once.size(); ++i)
    residual = std::max(residual, std::abs(once[i] - sol.values[i]));
  CHECK(residual < 1e-8);
}

TEST_CASE("lqr symmetry: mirrored nodes agree") {
  EnvironmentSpec env = make_lqr_1d();
  GridSpec grid = GridSpec::box(env, 41, 2.0);
  GridSolution sol = solve_infinite(env, grid, 0.0, make_rate_set(1, env.M), 1e-8, 200000);
  const int p = 41;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      const double a = sol.values[static_cast<std::size_t>(i) * p + j];
      const double b = sol.values[static_cast<std::size_t>(p - 1 - i) * p + (p - 1 - j)];
      CHECK(a == doctest::Approx(b).epsilon(1e-6));
    }
}

TEST_CASE("still plant matches the quadrature oracle") {
  EnvironmentSpec env = still_plant();
  GridSpec grid = GridSpec::box(env, 81, 2.0);
  GridSolution sol = solve_infinite(env, grid, 0.0, make_rate_set(1, env.M), 1e-7, 300000);
  // Probe the inner region at off-node points.
  RngState rng = make_rng(3);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double x = uniform(rng, -1.2, 1.2);
    const double u = uniform(rng, -1.2, 1.2);
    const double expect = testutil::still_plant_value(x, u, env.gamma, env.M);
    worst = std::max(worst, std::abs(interpolate(sol, {{x}, {u}}) - expect));
  }
  CHECK(worst < 0.05);  // coarse 81x81 grid; the acceptance suite tightens this
}

TEST_CASE("frozen control (M = 0) matches the drift closed form") {
  // With M = 0 the control never moves: on x' = u the trajectory is x + u t.
  // Wide x-extent so discounted mass never reaches the clamped boundary.
  EnvironmentSpec env = make_lqr_1d();
  env.M = 0.0;
  GridSpec grid;
  grid.axes = {{-40.0, 40.0, 8001}, {-0.2, 0.2, 5}};
  GridSolution sol = solve_infinite(env, grid, 0.05, make_rate_set(1, 0.0), 1e-9, 100000);
  for (double u : {-0.2, -0.1, 0.0, 0.1, 0.2}) {
    for (double x : {-1.0, 0.0, 1.0}) {
      const double expect = testutil::frozen_control_value(x, u, env.gamma);
      const double quad = testutil::simpson(
          [&](double t) { return std::exp(-env.gamma * t) * ((x + u * t) * (x + u * t) + u * u); },
          0.0, 400.0, 40000);
      CHECK(quad == doctest::Approx(expect).epsilon(1e-6));
      CHECK(interpolate(sol, {{x}, {u}}) == doctest::Approx(expect).epsilon(5e-3));
    }
  }
}

TEST_CASE("finite horizon: terminal slice is exact and constants persist") {
  EnvironmentSpec env = make_lqr_1d();
  GridSpec grid = GridSpec::box(env, 21, 1.0);
  TerminalCost q = [](const std::vector<double>& x) { return x[0] * x[0]; };
  GridSolution sol = solve_finite(env, q, 1.0, 10, grid, make_rate_set(1, env.M));
  REQUIRE(sol.time_slices == 11);
  const long nodes = grid.node_count();
  for (long node = 0; node < nodes; ++node) {
    const auto coords = grid.node_coords(node);
    CHECK(sol.slice(10)[node] == coords[0] * coords[0]);  // exact, by construction
  }

  // r = 0 with constant terminal cost stays constant at every time.
  EnvironmentSpec zero = env;
  zero.cost_scale = 0.0;
  GridSolution csol =
      solve_finite(zero, [](const std::vector<double>&) { return 3.5; }, 1.0, 10, grid,
                   make_rate_set(1, env.M));
  for (double v : csol.values) CHECK(v == doctest::Approx(3.5).epsilon(1e-14));
}

TEST_CASE("finite horizon backward march satisfies the one-step recursion") {
  EnvironmentSpec env = make_lqr_1d();
  GridSpec grid = GridSpec::box(env, 15, 1.0);
  ControlRateSet rates = make_rate_set(1, env.M);
  const int steps = 6;
  GridSolution sol = solve_finite(env, [](const std::vector<double>& x) { return x[0] * x[0]; },
                                  0.6, steps, grid, rates);
  SemiLagrangianOperator op = SemiLagrangianOperator::finite_step(env, grid, 0.1, rates);
  const long nodes = grid.node_count();
  for (int k = 0; k < steps; ++k) {
    std::vector<double> next(sol.slice(k + 1), sol.slice(k + 1) + nodes);
    std::vector<double> expect;
    op.apply(next, expect);
    for (long node = 0; node < nodes; ++node)
      CHECK(sol.slice(k)[node] == doctest::Approx(expect[static_cast<std::size_t>(node)]).epsilon(1e-14));
  }
}

TEST_CASE("finite-horizon refinement is Cauchy") {
  EnvironmentSpec env = make_lqr_1d();
  TerminalCost q = [](const std::vector<double>& x) { return x[0] * x[0]; };
  auto solve_at = [&](int points, int steps) {
    GridSpec grid = GridSpec::box(env, points, 2.0);
    return solve_finite(env, q, 1.0, steps, grid, make_rate_set(1, env.M));
  };
  GridSolution coarse = solve_at(21, 10);
  GridSolution mid = solve_at(41, 20);
  GridSolution fine = solve_at(81, 40);

  RngState rng = make_rng(5);
  double d1 = 0.0, d2 = 0.0;
  for (int k = 0; k < 40; ++k) {
    AugmentedState z{{uniform(rng, -1.0, 1.0)}, {uniform(rng, -1.0, 1.0)}};
    d1 = std::max(d1, std::abs(interpolate_slice(mid, 0, z) - interpolate_slice(coarse, 0, z)));
    d2 = std::max(d2, std::abs(interpolate_slice(fine, 0, z) - interpolate_slice(mid, 0, z)));
  }
  CHECK(d2 < d1);
}

TEST_CASE("greedy policy: ties take the first-listed rate, and (1,1) drives u down") {
  EnvironmentSpec env = make_lqr_1d();
  env.cost_scale = 0.0;
  GridSpec grid = GridSpec::box(env, 21, 2.0);
  ControlRateSet rates = make_rate_set(1, env.M);
  GridSolution zero_sol = solve_infinite(env, grid, 0.0, rates, 1e-10, 100);
  RatePolicy tie_policy = grid_greedy_policy(env, zero_sol, rates);
  CHECK(tie_policy({{0.3}, {0.3}})[0] == rates.rates[0][0]);  // all ties -> first rate (-M)

  EnvironmentSpec live = make_lqr_1d();
  GridSolution sol = solve_infinite(live, grid, 0.0, rates, 1e-7, 300000);
  RatePolicy greedy = grid_greedy_policy(live, sol, rates);
  CHECK(greedy({{1.0}, {1.0}})[0] == doctest::Approx(-live.M));
  CHECK(greedy({{-1.0}, {-1.0}})[0] == doctest::Approx(live.M));  // mirrored by symmetry
}

TEST_CASE("monotonicity machinery validates its input") {
  EnvironmentSpec env = make_lqr_1d();
  GridSpec grid = GridSpec::box(env, 11, 1.0);
  CHECK_THROWS_AS(monotonicity_in_M(env, grid, {1.0, 0.5}, 0.0, 16, 1e-6, 1000),
                  contract_error);
}

TEST_CASE("grid solution round trip, csv and raw") {
  testutil::TempDir tmp("hjb");
  EnvironmentSpec env = make_lqr_1d();
  env.cost_scale = 0.0;
  GridSpec grid = GridSpec::box(env, 7, 1.0);
  GridSolution sol = solve_infinite(env, grid, 0.0, make_rate_set(1, env.M), 1e-10, 50);
  sol.meta.final_update = 0.25;  // nontrivial metadata for the comparison

  for (bool raw : {false, true}) {
    const std::string base = tmp.path(raw ? "sol_raw" : "sol_csv");
    save_grid_solution(base, sol, raw);
    GridSolution back = load_grid_solution(base + ".json");
    CHECK(back.values == sol.values);
    CHECK(back.grid.axes.size() == sol.grid.axes.size());
    CHECK(back.meta.final_update == sol.meta.final_update);
    CHECK(back.meta.delta == sol.meta.delta);
  }
  CHECK_THROWS_AS(load_grid_solution(tmp.path("absent.json")), io_error);
}

TEST_CASE("capacity cap") {
  EnvironmentSpec env = make_random_lqr(3, 2, 1);  // n + m = 5
  GridSpec grid;
  for (int i = 0; i < 5; ++i) grid.axes.push_back({-1.0, 1.0, 3});
  CHECK_THROWS_AS(
      SemiLagrangianOperator::stationary(env, grid, 0.01, make_rate_set(2, 1.0, 4)),
      contract_error);
}

TEST_CASE("auto delta is the cfl-like default") {
  EnvironmentSpec env = make_lqr_1d();
  GridSpec grid = GridSpec::box(env, 201, 2.0);  // spacing 0.02, max |F| = 2
  CHECK(auto_delta(env, grid) == doctest::Approx(0.5 * 0.02 / 2.0).epsilon(1e-12));
}

TEST_CASE("non-convergence carries the partial solution") {
  EnvironmentSpec env = make_lqr_1d();
  GridSpec grid = GridSpec::box(env, 21, 2.0);
  try {
    solve_infinite(env, grid, 0.0, make_rate_set(1, env.M), 1e-12, 3);
    FAIL("expected convergence_error");
  } catch (const convergence_error& e) {
    CHECK(e.last_update > 0.0);
    CHECK(e.partial.values.size() == static_cast<std::size_t>(grid.node_count()));
    CHECK_FALSE(e.partial.meta.converged);
  }
}
