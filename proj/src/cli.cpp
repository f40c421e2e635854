#include "ctql/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctql/common.hpp"
#include "ctql/csv.hpp"
#include "ctql/hjb.hpp"
#include "ctql/learner.hpp"

namespace ctql::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::set<std::string> kEnvKeys = {"preset", "n",     "m",     "seed",  "gamma",
                                        "M",      "x_min", "x_max", "u_min", "u_max",
                                        "A",      "B",     "cost_scale"};

const std::set<std::string> kTrainKeys = {
    "N",          "K",           "h",          "tau",           "learning_rate",
    "grad_zero_tol", "substeps", "eval_every", "eval_T",        "eval_start_x",
    "eval_start_u",  "inner_steps", "policy_hold", "hidden",    "bellman_probes",
    "bellman_t_span", "checkpoint_every"};

const std::set<std::string> kGridKeys = {"grid_points", "grid_scale", "delta",
                                         "tol",         "max_iter",   "rate_directions",
                                         "horizon_T",   "time_steps", "terminal"};

std::set<std::string> union_keys(std::initializer_list<const std::set<std::string>*> sets) {
  std::set<std::string> out;
  for (const auto* s : sets) out.insert(s->begin(), s->end());
  return out;
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return std::string(buf);
}

std::string list_to_string(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt_g17(v[i]);
  }
  return out;
}

std::string matrix_to_string(const Matrix& m) { return list_to_string(m.data); }

// Load config file (if given), apply --set overrides and --seed shorthand.
Config assemble_config(const std::string& config_path, const std::vector<std::string>& sets,
                       const std::string& seed) {
  Config cfg = config_path.empty() ? Config() : Config::from_file(config_path);
  for (const std::string& kv : sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw config_error("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!seed.empty()) cfg.set("seed", seed);
  return cfg;
}

// Fill every env key with its final value so fingerprints pin the actual
// dynamics, not just the preset name.
void resolve_env_keys(Config& cfg, const EnvironmentSpec& env) {
  cfg.set("preset", cfg.get_string("preset", "lqr1d"));
  cfg.set("n", std::to_string(env.n));
  cfg.set("m", std::to_string(env.m));
  cfg.set("seed", std::to_string(cfg.get_u64("seed", 0)));
  cfg.set("gamma", fmt_g17(env.gamma));
  cfg.set("M", fmt_g17(env.M));
  cfg.set("x_min", fmt_g17(env.x_min));
  cfg.set("x_max", fmt_g17(env.x_max));
  cfg.set("u_min", fmt_g17(env.u_min));
  cfg.set("u_max", fmt_g17(env.u_max));
  cfg.set("cost_scale", fmt_g17(env.cost_scale));
  cfg.set("A", matrix_to_string(env.A));
  cfg.set("B", matrix_to_string(env.B));
}

TrainConfig train_config_from(const Config& cfg, const EnvironmentSpec& env) {
  TrainConfig tc;
  tc.N = cfg.get_long("N", tc.N);
  tc.K = cfg.get_int("K", tc.K);
  tc.h = cfg.get_double("h", tc.h);
  tc.tau = cfg.get_double("tau", tc.tau);
  tc.learning_rate = cfg.get_double("learning_rate", tc.learning_rate);
  tc.grad_zero_tol = cfg.get_double("grad_zero_tol", tc.grad_zero_tol);
  tc.substeps = cfg.get_int("substeps", tc.substeps);
  tc.seed = cfg.get_u64("seed", 0);
  tc.eval_every = cfg.get_long("eval_every", tc.eval_every);
  tc.eval_T = cfg.get_double("eval_T", tc.eval_T);
  tc.inner_steps = cfg.get_int("inner_steps", tc.inner_steps);
  tc.policy_hold = policy_hold_from_string(cfg.get_string("policy_hold", "state_feedback"));
  if (cfg.has("hidden")) tc.hidden = cfg.get_int_list("hidden");
  tc.bellman_probes = cfg.get_int("bellman_probes", tc.bellman_probes);
  tc.bellman_t_span = cfg.get_double("bellman_t_span", tc.bellman_t_span);
  tc.checkpoint_every = cfg.get_long("checkpoint_every", tc.checkpoint_every);
  if (cfg.has("eval_start_x") || cfg.has("eval_start_u")) {
    tc.eval_start.x = cfg.get_double_list("eval_start_x");
    tc.eval_start.u = cfg.get_double_list("eval_start_u");
  } else {
    tc.eval_start = default_eval_start(env, tc.seed);
  }
  tc.validate();
  return tc;
}

void resolve_train_keys(Config& cfg, const TrainConfig& tc) {
  cfg.set("N", std::to_string(tc.N));
  cfg.set("K", std::to_string(tc.K));
  cfg.set("h", fmt_g17(tc.h));
  cfg.set("tau", fmt_g17(tc.tau));
  cfg.set("learning_rate", fmt_g17(tc.learning_rate));
  cfg.set("grad_zero_tol", fmt_g17(tc.grad_zero_tol));
  cfg.set("substeps", std::to_string(tc.substeps));
  cfg.set("eval_every", std::to_string(tc.eval_every));
  cfg.set("eval_T", fmt_g17(tc.eval_T));
  cfg.set("eval_start_x", list_to_string(tc.eval_start.x));
  cfg.set("eval_start_u", list_to_string(tc.eval_start.u));
  cfg.set("inner_steps", std::to_string(tc.inner_steps));
  cfg.set("policy_hold", to_string(tc.policy_hold));
  std::string hidden;
  for (std::size_t i = 0; i < tc.hidden.size(); ++i) {
    if (i) hidden += ',';
    hidden += std::to_string(tc.hidden[i]);
  }
  cfg.set("hidden", hidden);
  cfg.set("bellman_probes", std::to_string(tc.bellman_probes));
  cfg.set("bellman_t_span", fmt_g17(tc.bellman_t_span));
  cfg.set("checkpoint_every", std::to_string(tc.checkpoint_every));
}

void write_manifest(const std::string& path, const std::string& command, const Config& cfg,
                    const std::vector<std::pair<std::string, std::string>>& artifacts,
                    const std::string& started, const std::string& status) {
  json j;
  j["command"] = command;
  j["config"] = json::object();
  for (const auto& [k, v] : cfg.entries()) j["config"][k] = v;
  j["fingerprint"] = cfg.fingerprint();
  j["seed"] = cfg.get_u64("seed", 0);
  j["status"] = status;
  j["artifacts"] = json::object();
  for (const auto& [name, p] : artifacts) j["artifacts"][name] = p;
  j["wall_clock"] = {{"started", started}, {"finished", iso_now()}};
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

std::string checkpoint_name(long iteration) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "checkpoint_iter_%06ld.json", iteration);
  return std::string(buf);
}

// ---------------------------------------------------------------------------

int cmd_train(const std::string& config_path, const std::vector<std::string>& sets,
              const std::string& seed, const std::string& out_dir, std::ostream& out) {
  const std::string started = iso_now();
  Config cfg = assemble_config(config_path, sets, seed);
  cfg.require_known(union_keys({&kEnvKeys, &kTrainKeys}));
  const EnvironmentSpec env = env_from_config(cfg);
  const TrainConfig tc = train_config_from(cfg, env);
  resolve_env_keys(cfg, env);
  resolve_train_keys(cfg, tc);

  fs::create_directories(out_dir);
  const std::string curve_path = out_dir + "/curve.csv";
  const std::string final_path = out_dir + "/checkpoint_final.json";
  std::vector<std::pair<std::string, std::string>> artifacts = {
      {"curve", curve_path}, {"checkpoint_final", final_path}};
  const std::string fingerprint = cfg.fingerprint();

  Trainer trainer(env, tc);
  auto checkpoint_at = [&](long iter) {
    const std::string path = out_dir + "/" + checkpoint_name(iter);
    save_checkpoint(path, trainer.params, trainer.target, trainer.adam, fingerprint);
    artifacts.emplace_back(checkpoint_name(iter), path);
  };

  bool diverged = false;
  long diverged_at = -1;
  std::string diverged_msg;
  trainer.evaluate();
  if (tc.checkpoint_every > 0) checkpoint_at(0);
  try {
    for (long i = 1; i <= tc.N; ++i) {
      trainer.run_iteration();
      const bool periodic = tc.eval_every > 0 && i % tc.eval_every == 0;
      if (periodic || i == tc.N) trainer.evaluate();
      if (tc.checkpoint_every > 0 && i % tc.checkpoint_every == 0 && i != tc.N) checkpoint_at(i);
    }
  } catch (const divergence_error& e) {
    diverged = true;
    diverged_at = e.index;
    diverged_msg = e.what();
  }

  write_curve_csv(curve_path, trainer.curve);
  save_checkpoint(final_path, trainer.params, trainer.target, trainer.adam, fingerprint);
  write_manifest(out_dir + "/manifest.json", "train", cfg, artifacts, started,
                 diverged ? "diverged" : "ok");

  out << "fingerprint=" << fingerprint << "\n";
  out << "iterations=" << trainer.iteration() << "\n";
  if (!trainer.curve.rows.empty())
    out << "final_eval_cost=" << fmt_g17(trainer.curve.rows.back().eval_cost) << "\n";
  if (diverged) {
    out << "diverged_at=" << diverged_at << "\n" << diverged_msg << "\n";
    return kExitDivergence;
  }
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& config_path,
             const std::vector<std::string>& sets, const std::string& seed,
             const std::string& x0_str, const std::string& u0_str, double T_eval,
             double sample_dt, const std::string& out_dir, std::ostream& out) {
  Config cfg = assemble_config(config_path, sets, seed);
  std::set<std::string> allowed = kEnvKeys;
  allowed.insert({"grad_zero_tol", "substeps", "h"});
  cfg.require_known(allowed);
  const EnvironmentSpec env = env_from_config(cfg);

  const Checkpoint ck = load_checkpoint(checkpoint_path);
  if (ck.params.input_dim() != env.n + env.m)
    throw io_error("checkpoint input width " + std::to_string(ck.params.input_dim()) +
                   " does not match environment n + m = " + std::to_string(env.n + env.m));

  AugmentedState z0;
  z0.x = x0_str.empty() ? std::vector<double>(static_cast<std::size_t>(env.n), 1.0)
                        : Config::from_string("v=" + x0_str).get_double_list("v");
  z0.u = u0_str.empty() ? std::vector<double>(static_cast<std::size_t>(env.m), 1.0)
                        : Config::from_string("v=" + u0_str).get_double_list("v");
  if (static_cast<int>(z0.x.size()) != env.n || static_cast<int>(z0.u.size()) != env.m)
    throw io_error("initial state dimensions do not match the environment");

  const IntegratorConfig icfg{cfg.get_int("substeps", 5), cfg.get_double("h", 0.05)};
  const double grad_zero_tol = cfg.get_double("grad_zero_tol", 1e-12);
  RngState rng = rng_stream(cfg.get_u64("seed", 0), stream_tag::eval_base);
  const RatePolicy policy = make_greedy(ck.params, env, grad_zero_tol, rng);

  const double cost = evaluate_policy(env, z0, policy, T_eval, icfg);

  fs::create_directories(out_dir);
  const std::string traj_path = out_dir + "/trajectory.csv";
  RngState traj_rng = rng_stream(cfg.get_u64("seed", 0), stream_tag::eval_base + 1);
  const RatePolicy traj_policy = make_greedy(ck.params, env, grad_zero_tol, traj_rng);
  write_trajectory_csv(traj_path, trajectory_record(env, z0, traj_policy, T_eval, icfg, sample_dt));

  out << "eval_cost=" << fmt_g17(cost) << "\n";
  out << "trajectory=" << traj_path << "\n";
  return kExitOk;
}

int cmd_solve_hjb(const std::string& config_path, const std::vector<std::string>& sets,
                  const std::string& seed, const std::string& mode, const std::string& out_dir,
                  const std::string& name, bool raw_values, std::ostream& out) {
  const std::string started = iso_now();
  Config cfg = assemble_config(config_path, sets, seed);
  cfg.require_known(union_keys({&kEnvKeys, &kGridKeys}));
  const EnvironmentSpec env = env_from_config(cfg);
  if (env.n + env.m > 4)
    throw config_error("solve-hjb: n + m = " + std::to_string(env.n + env.m) +
                       " exceeds the grid solver capacity of 4");

  const int points = cfg.get_int("grid_points", 101);
  const double scale = cfg.get_double("grid_scale", 2.0);
  const GridSpec grid = GridSpec::box(env, points, scale);
  const double delta = cfg.get_double("delta", 0.0);
  const double tol = cfg.get_double("tol", 1e-7);
  const long max_iter = cfg.get_long("max_iter", 500000);
  const int directions = cfg.get_int("rate_directions", 16);
  const ControlRateSet rates = make_rate_set(env.m, env.M, directions);

  resolve_env_keys(cfg, env);
  cfg.set("grid_points", std::to_string(points));
  cfg.set("grid_scale", fmt_g17(scale));
  cfg.set("delta", fmt_g17(delta));
  cfg.set("tol", fmt_g17(tol));
  cfg.set("max_iter", std::to_string(max_iter));
  cfg.set("rate_directions", std::to_string(directions));
  cfg.set("horizon_T", fmt_g17(cfg.get_double("horizon_T", 1.0)));
  cfg.set("time_steps", std::to_string(cfg.get_int("time_steps", 20)));
  cfg.set("terminal", cfg.get_string("terminal", "quadratic"));

  fs::create_directories(out_dir);
  const std::string base = out_dir + "/" + name;
  const std::string log_path = base + ".convergence.csv";
  CsvWriter log(log_path, {"iteration", "sup_update"});

  GridSolution sol;
  bool converged = true;
  if (mode == "infinite") {
    try {
      sol = solve_infinite(env, grid, delta, rates, tol, max_iter, nullptr,
                           [&](long it, double update) {
                             log.row({std::to_string(it), fmt_g17(update)});
                           });
    } catch (const convergence_error& e) {
      sol = e.partial;
      converged = false;
    }
  } else if (mode == "finite") {
    const double T = cfg.get_double("horizon_T", 1.0);
    const int steps = cfg.get_int("time_steps", 20);
    const std::string terminal = cfg.get_string("terminal", "quadratic");
    TerminalCost q;
    if (terminal == "quadratic") {
      q = [](const std::vector<double>& x) {
        double acc = 0.0;
        for (double v : x) acc += v * v;
        return acc;
      };
    } else if (terminal == "zero") {
      q = [](const std::vector<double>&) { return 0.0; };
    } else {
      throw config_error("terminal: expected quadratic or zero, got '" + terminal + "'");
    }
    sol = solve_finite(env, q, T, steps, grid, rates);
  } else {
    throw config_error("--mode must be infinite or finite, got '" + mode + "'");
  }
  log.close();

  save_grid_solution(base, sol, raw_values);
  write_manifest(base + ".manifest.json", "solve-hjb", cfg,
                 {{"solution", base + ".json"},
                  {"values", base + (raw_values ? ".values.bin" : ".values.csv")},
                  {"convergence", log_path}},
                 started, converged ? "ok" : "not_converged");

  out << "solution=" << base << ".json\n";
  out << "converged=" << (converged ? "true" : "false") << "\n";
  out << "iterations=" << sol.meta.iterations << "\n";
  out << "final_update=" << fmt_g17(sol.meta.final_update) << "\n";
  return converged ? kExitOk : kExitDivergence;
}

int cmd_compare(const std::string& checkpoint_path, const std::string& solution_path,
                const std::string& config_path, const std::vector<std::string>& sets,
                const std::string& seed, double inner, int probes_per_axis,
                double grad_zero_tol, const std::string& out_dir, std::ostream& out) {
  Config cfg = assemble_config(config_path, sets, seed);
  cfg.require_known(kEnvKeys);
  EnvironmentSpec env = env_from_config(cfg);

  const Checkpoint ck = load_checkpoint(checkpoint_path);
  const GridSolution sol = load_grid_solution(solution_path);
  if (sol.time_slices != 1) throw io_error("compare: needs a stationary grid solution");
  const int dim = static_cast<int>(sol.grid.axes.size());
  if (dim != env.n + env.m)
    throw io_error("compare: grid dimension " + std::to_string(dim) +
                   " does not match environment n + m = " + std::to_string(env.n + env.m));
  if (ck.params.input_dim() != dim)
    throw io_error("compare: checkpoint input width " + std::to_string(ck.params.input_dim()) +
                   " does not match the grid dimension " + std::to_string(dim));
  if (!(inner > 0.0 && inner <= 1.0)) throw config_error("--inner must be in (0, 1]");
  if (probes_per_axis < 2) throw config_error("--probes must be >= 2");
  if (std::pow(probes_per_axis, dim) > 1e6)
    throw config_error("--probes lattice too large; lower --probes");

  // The stored solution pins gamma, M and the scheme step.
  env.gamma = sol.meta.gamma;
  env.M = sol.meta.M;
  const ControlRateSet rates = make_rate_set(env.m, env.M, 16);
  const SemiLagrangianOperator op = SemiLagrangianOperator::stationary(
      env, sol.grid, sol.meta.delta, rates, /*precompute=*/false);

  fs::create_directories(out_dir);
  std::vector<std::string> header;
  for (int i = 0; i < env.n; ++i) header.push_back("x_" + std::to_string(i));
  for (int i = 0; i < env.m; ++i) header.push_back("u_" + std::to_string(i));
  header.insert(header.end(), {"q_learned", "q_oracle", "abs_err", "policy_match"});
  CsvWriter csv(out_dir + "/compare.csv", header);

  auto probe_coord = [&](const AxisSpec& ax, int k) {
    const double mid = 0.5 * (ax.min + ax.max);
    const double half = 0.5 * (ax.max - ax.min) * inner;
    return mid - half + 2.0 * half * k / (probes_per_axis - 1);
  };
  auto sgn = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };

  double mean_err = 0.0, max_err = 0.0;
  long matches = 0, total = 0;
  std::vector<int> digit(static_cast<std::size_t>(dim), 0);
  for (;;) {
    AugmentedState z;
    z.x.resize(static_cast<std::size_t>(env.n));
    z.u.resize(static_cast<std::size_t>(env.m));
    for (int a = 0; a < env.n; ++a)
      z.x[static_cast<std::size_t>(a)] = probe_coord(sol.grid.axes[static_cast<std::size_t>(a)], digit[static_cast<std::size_t>(a)]);
    for (int a = 0; a < env.m; ++a)
      z.u[static_cast<std::size_t>(a)] =
          probe_coord(sol.grid.axes[static_cast<std::size_t>(env.n + a)], digit[static_cast<std::size_t>(env.n + a)]);

    const double q_learned = forward(ck.params, z);
    const double q_oracle = interpolate(sol, z);
    const double err = std::abs(q_learned - q_oracle);
    mean_err += err;
    max_err = std::max(max_err, err);

    // Deterministic learner direction: zero when the gradient is below
    // tolerance (no random branch in a comparison report).
    const std::vector<double> g = input_gradient(ck.params, z);
    std::vector<double> gu(g.begin() + env.n, g.end());
    std::vector<double> a_learned(static_cast<std::size_t>(env.m), 0.0);
    const double gn = norm2(gu);
    if (gn > grad_zero_tol)
      for (std::size_t c = 0; c < gu.size(); ++c) a_learned[c] = -env.M * gu[c] / gn;
    const std::vector<double>& a_oracle =
        rates.rates[static_cast<std::size_t>(op.greedy_rate_index(sol.values, z))];
    bool match = true;
    for (std::size_t c = 0; c < a_learned.size(); ++c)
      if (sgn(a_learned[c]) != sgn(a_oracle[c])) match = false;
    matches += match ? 1 : 0;
    ++total;

    std::vector<std::string> fields;
    for (double v : z.x) fields.push_back(fmt_g17(v));
    for (double v : z.u) fields.push_back(fmt_g17(v));
    fields.insert(fields.end(),
                  {fmt_g17(q_learned), fmt_g17(q_oracle), fmt_g17(err), match ? "1" : "0"});
    csv.row(fields);

    int a = dim - 1;
    while (a >= 0 && ++digit[static_cast<std::size_t>(a)] == probes_per_axis) {
      digit[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
  csv.close();
  mean_err /= static_cast<double>(total);

  out << "probes=" << total << "\n";
  out << "mean_abs_err=" << fmt_g17(mean_err) << "\n";
  out << "max_abs_err=" << fmt_g17(max_err) << "\n";
  out << "policy_match_rate=" << fmt_g17(static_cast<double>(matches) / total) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"continuous-time Q-learning with an HJB grid oracle"};
  app.require_subcommand(1);

  std::string config_path, seed, out_dir = ".";
  std::vector<std::string> sets;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key=value config file");
    sub->add_option("--set", sets, "override a config key (key=value), repeatable");
    sub->add_option("--seed", seed, "shorthand for --set seed=...");
    sub->add_option("--out-dir", out_dir, "artifact directory");
  };

  CLI::App* train = app.add_subcommand("train", "run the training loop");
  add_common(train);

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint's greedy policy");
  add_common(eval);
  std::string checkpoint_path, x0_str, u0_str;
  double T_eval = 10.0, sample_dt = 0.05;
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint JSON")->required();
  eval->add_option("--x0", x0_str, "initial state, comma-separated");
  eval->add_option("--u0", u0_str, "initial control, comma-separated");
  eval->add_option("--T", T_eval, "evaluation horizon");
  eval->add_option("--sample-dt", sample_dt, "trajectory sampling step");

  CLI::App* solve = app.add_subcommand("solve-hjb", "grid-solve the Bellman equation");
  add_common(solve);
  std::string mode = "infinite", name = "hjb";
  bool raw_values = false;
  solve->add_option("--mode", mode, "infinite | finite");
  solve->add_option("--name", name, "artifact base name");
  solve->add_flag("--raw-values", raw_values, "write the value tensor as raw doubles");

  CLI::App* compare = app.add_subcommand("compare", "checkpoint vs grid solution");
  add_common(compare);
  std::string solution_path;
  double inner = 0.6, grad_zero_tol = 1e-12;
  int probes = 21;
  compare->add_option("--checkpoint", checkpoint_path, "checkpoint JSON")->required();
  compare->add_option("--solution", solution_path, "grid solution header JSON")->required();
  compare->add_option("--inner", inner, "probe the central fraction of the grid box");
  compare->add_option("--probes", probes, "probe lattice points per axis");
  compare->add_option("--grad-zero-tol", grad_zero_tol, "gradient zero threshold");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ctql: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (train->parsed()) return cmd_train(config_path, sets, seed, out_dir, out);
    if (eval->parsed())
      return cmd_eval(checkpoint_path, config_path, sets, seed, x0_str, u0_str, T_eval,
                      sample_dt, out_dir, out);
    if (solve->parsed())
      return cmd_solve_hjb(config_path, sets, seed, mode, out_dir, name, raw_values, out);
    if (compare->parsed())
      return cmd_compare(checkpoint_path, solution_path, config_path, sets, seed, inner, probes,
                         grad_zero_tol, out_dir, out);
  } catch (const config_error& e) {
    err << "ctql: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const contract_error& e) {
    err << "ctql: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const io_error& e) {
    err << "ctql: artifact error: " << e.what() << "\n";
    return kExitArtifact;
  } catch (const convergence_error& e) {
    err << "ctql: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const divergence_error& e) {
    err << "ctql: divergence: " << e.what() << "\n";
    return kExitDivergence;
  }
  return kExitConfig;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace ctql::cli
