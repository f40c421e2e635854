#include "ctql/learner.hpp"

#include <cmath>
#include <limits>

#include "ctql/common.hpp"
#include "ctql/csv.hpp"

namespace ctql {

PolicyHold policy_hold_from_string(const std::string& s) {
  if (s == "state_feedback") return PolicyHold::state_feedback;
  if (s == "iteration_start") return PolicyHold::iteration_start;
  throw config_error("policy_hold: expected state_feedback or iteration_start, got '" + s + "'");
}

std::string to_string(PolicyHold p) {
  return p == PolicyHold::state_feedback ? "state_feedback" : "iteration_start";
}

void TrainConfig::validate() const {
  if (N < 0) throw contract_error("train config: N must be >= 0");
  if (K < 1) throw contract_error("train config: K must be >= 1");
  if (!(h > 0.0)) throw contract_error("train config: h must be > 0");
  if (!(tau >= 0.0 && tau <= 1.0)) throw contract_error("train config: tau must be in [0, 1]");
  if (!(grad_zero_tol > 0.0)) throw contract_error("train config: grad_zero_tol must be > 0");
  if (substeps < 1) throw contract_error("train config: substeps must be >= 1");
  if (inner_steps < 1) throw contract_error("train config: inner_steps must be >= 1");
  if (eval_every < 0) throw contract_error("train config: eval_every must be >= 0");
  if (!(eval_T > 0.0)) throw contract_error("train config: eval_T must be > 0");
  if (bellman_probes < 1) throw contract_error("train config: bellman_probes must be >= 1");
  if (!(bellman_t_span > 0.0)) throw contract_error("train config: bellman_t_span must be > 0");
  if (checkpoint_every < 0) throw contract_error("train config: checkpoint_every must be >= 0");
}

void write_curve_csv(const std::string& path, const LearningCurve& curve) {
  CsvWriter csv(path, {"iter", "loss", "eval_cost", "bellman_residual"});
  for (const CurveRow& row : curve.rows)
    csv.row({std::to_string(row.iteration), fmt_g17(row.loss), fmt_g17(row.eval_cost),
             fmt_g17(row.bellman_residual)});
  csv.close();
}

std::vector<double> policy_direction(const std::vector<double>& grad_u, double M,
                                     double grad_zero_tol, RngState& rng) {
  if (M < 0.0) throw contract_error("policy_direction: M must be >= 0");
  const double g = norm2(grad_u);
  if (g > grad_zero_tol) {
    std::vector<double> a = grad_u;
    const double scale = -M / g;
    for (double& v : a) v *= scale;
    return a;
  }
  std::vector<double> a = unit_sphere(rng, static_cast<int>(grad_u.size()));
  for (double& v : a) v *= M;
  return a;
}

double build_target(double R, const AugmentedState& z_end, const TargetParams& target,
                    double gamma, double h) {
  if (!std::isfinite(R)) throw contract_error("build_target: non-finite rollout cost");
  if (!all_finite(z_end.x) || !all_finite(z_end.u))
    throw contract_error("build_target: non-finite end state");
  const double q = forward(target.net, z_end);
  if (!std::isfinite(q)) throw contract_error("build_target: non-finite target-network value");
  return R + std::exp(-gamma * h) * q;
}

RatePolicy make_greedy(const QNetworkParams& params, const EnvironmentSpec& env,
                       double grad_zero_tol, RngState& rng) {
  return [&params, &env, grad_zero_tol, &rng](const AugmentedState& z) {
    const std::vector<double> g = input_gradient(params, z);
    std::vector<double> gu(g.begin() + env.n, g.end());
    return policy_direction(gu, env.M, grad_zero_tol, rng);
  };
}

AugmentedState default_eval_start(const EnvironmentSpec& env, std::uint64_t seed) {
  AugmentedState z;
  if (env.n == 1 && env.m == 1) {
    z.x = {1.0};
    z.u = {1.0};
    return z;
  }
  RngState rng = rng_stream(seed, stream_tag::eval_start);
  z.x.resize(static_cast<std::size_t>(env.n));
  z.u.resize(static_cast<std::size_t>(env.m));
  for (double& v : z.x) v = uniform(rng, 0.0, 0.1);
  for (double& v : z.u) v = uniform(rng, 0.0, 0.1);
  return z;
}

double bellman_residual(const QNetworkParams& params, const EnvironmentSpec& env,
                        const std::vector<AugmentedState>& probe, double t_span,
                        const IntegratorConfig& cfg, double grad_zero_tol, RngState& rng) {
  if (probe.empty()) throw contract_error("bellman_residual: empty probe set");
  const RatePolicy policy = make_greedy(params, env, grad_zero_tol, rng);
  const double tail = std::exp(-env.gamma * t_span);
  double acc = 0.0;
  for (const AugmentedState& z0 : probe) {
    const RolloutResult r = rollout_span(env, z0, policy, t_span, cfg);
    acc += std::abs(forward(params, z0) - (r.discounted_cost + tail * forward(params, r.z_end)));
  }
  return acc / static_cast<double>(probe.size());
}

std::vector<std::pair<double, double>> optimality_monitor(const QEval& q_eval,
                                                          const EnvironmentSpec& env,
                                                          const AugmentedState& z0,
                                                          const RatePolicy& policy, double T_eval,
                                                          const IntegratorConfig& cfg,
                                                          double sample_dt) {
  if (!(sample_dt > 0.0)) throw contract_error("optimality_monitor: sample_dt must be > 0");
  std::vector<std::pair<double, double>> out;
  AugmentedState z = z0;
  double acc = 0.0;
  double s = 0.0;
  out.emplace_back(0.0, q_eval(z0));
  while (s < T_eval - 1e-12) {
    const double dt = std::min(sample_dt, T_eval - s);
    IntegratorConfig window = cfg;
    window.h = dt;
    const RolloutResult r = rollout_step(env, z, policy, window);
    acc += std::exp(-env.gamma * s) * r.discounted_cost;
    z = r.z_end;
    s += dt;
    out.emplace_back(s, acc + std::exp(-env.gamma * s) * q_eval(z));
  }
  return out;
}

Trainer::Trainer(EnvironmentSpec env_, TrainConfig cfg_)
    : env(std::move(env_)), cfg(std::move(cfg_)) {
  env.validate();
  cfg.validate();
  AdamConfig adam_cfg;
  adam_cfg.learning_rate = cfg.learning_rate;
  NetworkInit init = init_params(env.n, env.m, cfg.seed, cfg.hidden, adam_cfg);
  params = std::move(init.params);
  target = std::move(init.target);
  adam = std::move(init.adam);
  rng = rng_stream(cfg.seed, stream_tag::training);

  if (cfg.eval_start.x.empty() && cfg.eval_start.u.empty())
    cfg.eval_start = default_eval_start(env, cfg.seed);
  if (static_cast<int>(cfg.eval_start.x.size()) != env.n ||
      static_cast<int>(cfg.eval_start.u.size()) != env.m)
    throw contract_error("trainer: eval_start dimensions do not match the environment");

  RngState probe_rng = rng_stream(cfg.seed, stream_tag::bellman_probes);
  bellman_probe_set = sample_domain(env, cfg.bellman_probes, probe_rng);
}

void Trainer::run_iteration() {
  const long iter = iteration_ + 1;
  const IntegratorConfig icfg{cfg.substeps, cfg.h};

  try {
    const std::vector<AugmentedState> starts = sample_domain(env, cfg.K, rng);
    const RatePolicy feedback = make_greedy(params, env, cfg.grad_zero_tol, rng);

    std::vector<Sample> batch;
    batch.reserve(starts.size());
    for (const AugmentedState& z0 : starts) {
      RolloutResult r;
      if (cfg.policy_hold == PolicyHold::state_feedback) {
        r = rollout_step(env, z0, feedback, icfg);
      } else {
        const std::vector<double> a0 = feedback(z0);
        r = rollout_step(env, z0, [&a0](const AugmentedState&) { return a0; }, icfg);
      }
      batch.push_back(Sample{flatten(z0), build_target(r.discounted_cost, r.z_end, target,
                                                       env.gamma, cfg.h)});
    }

    double loss = 0.0;
    for (int s = 0; s < cfg.inner_steps; ++s) {
      const double step_loss = mse_train_step(params, adam, batch);
      if (s == 0) loss = step_loss;
    }
    soft_update(params, target, cfg.tau);
    last_loss_ = loss;
    iteration_ = iter;
  } catch (const divergence_error& e) {
    throw divergence_error(std::string(e.what()) + " (training iteration " +
                               std::to_string(iter) + ")",
                           iter);
  }
}

CurveRow Trainer::evaluate() {
  CurveRow row;
  row.iteration = iteration_;
  row.loss = last_loss_;

  RngState eval_rng = rng_stream(cfg.seed, stream_tag::eval_base + static_cast<std::uint64_t>(iteration_));
  const RatePolicy policy = make_greedy(params, env, cfg.grad_zero_tol, eval_rng);
  const IntegratorConfig icfg{cfg.substeps, cfg.h};
  try {
    row.eval_cost = evaluate_policy(env, cfg.eval_start, policy, cfg.eval_T, icfg);
  } catch (const divergence_error&) {
    // An unstable policy is a data point, not a crash.
    row.eval_cost = std::numeric_limits<double>::infinity();
  }

  RngState bellman_rng =
      rng_stream(cfg.seed, stream_tag::bellman_base + static_cast<std::uint64_t>(iteration_));
  try {
    row.bellman_residual = bellman_residual(params, env, bellman_probe_set, cfg.bellman_t_span,
                                            icfg, cfg.grad_zero_tol, bellman_rng);
  } catch (const divergence_error&) {
    row.bellman_residual = std::numeric_limits<double>::infinity();
  }

  curve.rows.push_back(row);
  return row;
}

TrainResult train(const EnvironmentSpec& env, const TrainConfig& cfg) {
  Trainer trainer(env, cfg);
  trainer.evaluate();  // iteration-0 baseline
  for (long i = 1; i <= cfg.N; ++i) {
    trainer.run_iteration();
    const bool periodic = cfg.eval_every > 0 && i % cfg.eval_every == 0;
    if (periodic || i == cfg.N) trainer.evaluate();
  }
  return TrainResult{std::move(trainer.params), std::move(trainer.target),
                     std::move(trainer.adam), std::move(trainer.curve)};
}

}  // namespace ctql
