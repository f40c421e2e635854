#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ctql/env.hpp"
#include "ctql/odeint.hpp"
#include "ctql/qnet.hpp"
#include "ctql/rng.hpp"

namespace ctql {

/// Whether the feedback law is re-evaluated at every integrator query
/// (state_feedback) or frozen per rollout at its starting point
/// (iteration_start).
enum class PolicyHold { state_feedback, iteration_start };

PolicyHold policy_hold_from_string(const std::string& s);
std::string to_string(PolicyHold p);

struct TrainConfig {
  long N = 1000;                // iterations
  int K = 10;                   // samples per iteration
  double h = 0.05;              // rollout horizon
  double tau = 1e-2;            // target-network blend
  double learning_rate = 1e-3;
  double grad_zero_tol = 1e-12;  // |grad_u Q| below this counts as zero
  int substeps = 5;
  std::uint64_t seed = 0;
  long eval_every = 50;
  double eval_T = 10.0;
  AugmentedState eval_start;  // empty -> default_eval_start(env, seed)
  int inner_steps = 1;        // optimizer steps per iteration
  PolicyHold policy_hold = PolicyHold::state_feedback;
  std::vector<int> hidden = {128, 128};
  int bellman_probes = 16;
  double bellman_t_span = 1.0;
  long checkpoint_every = 0;  // used by the CLI; 0 disables periodic checkpoints

  void validate() const;
};

struct CurveRow {
  long iteration = 0;
  double loss = 0.0;
  double eval_cost = 0.0;
  double bellman_residual = 0.0;
};

struct LearningCurve {
  std::vector<CurveRow> rows;
};

/// Header `iter,loss,eval_cost,bellman_residual`.
void write_curve_csv(const std::string& path, const LearningCurve& curve);

/// The Hamiltonian-minimizing rate: -M g/|g| when |g| > grad_zero_tol, else a
/// uniformly random direction of length M (exactly 0 when M = 0).
std::vector<double> policy_direction(const std::vector<double>& grad_u, double M,
                                     double grad_zero_tol, RngState& rng);

/// R + e^{-gamma h} Q_target(z_end). The target network is a constant here;
/// no gradient flows through it.
double build_target(double R, const AugmentedState& z_end, const TargetParams& target,
                    double gamma, double h);

/// Feedback law a(z) = policy_direction(grad_u Q(z), M, .). Captures all
/// arguments by reference; keep them alive for the lifetime of the policy.
RatePolicy make_greedy(const QNetworkParams& params, const EnvironmentSpec& env,
                       double grad_zero_tol, RngState& rng);

/// (1,1) in one dimension, otherwise a point drawn once from [0, 0.1]^(n+m)
/// on the stream (seed, eval_start).
AugmentedState default_eval_start(const EnvironmentSpec& env, std::uint64_t seed);

/// Mean over probes of |Q(z0) - (rollout cost + e^{-gamma t_span} Q(z_end))|
/// under the network's own greedy feedback.
double bellman_residual(const QNetworkParams& params, const EnvironmentSpec& env,
                        const std::vector<AugmentedState>& probe, double t_span,
                        const IntegratorConfig& cfg, double grad_zero_tol, RngState& rng);

using QEval = std::function<double(const AugmentedState&)>;

/// Samples of g(s) = accumulated discounted cost over [0, s] plus
/// e^{-gamma s} Q(z(s)) along the closed-loop trajectory; constant iff the
/// policy is optimal for Q, non-decreasing for any admissible policy.
std::vector<std::pair<double, double>> optimality_monitor(const QEval& q_eval,
                                                          const EnvironmentSpec& env,
                                                          const AugmentedState& z0,
                                                          const RatePolicy& policy, double T_eval,
                                                          const IntegratorConfig& cfg,
                                                          double sample_dt);

/// One training run, held open so callers can step it, checkpoint it, and
/// inspect state. Single-writer: one thread owns the instance. Fields are
/// public on purpose; tests perturb them directly.
class Trainer {
 public:
  Trainer(EnvironmentSpec env_, TrainConfig cfg_);

  /// One iteration: sample K points, roll each out under the current greedy
  /// law, build targets with the frozen target network, one (or inner_steps)
  /// Adam step(s), then the soft target update. Throws divergence_error
  /// (carrying the iteration index) on rollout blow-up or non-finite loss;
  /// the trainer state remains valid for checkpointing.
  void run_iteration();

  /// Appends a learning-curve row at the current iteration: last training
  /// loss, discounted eval cost from eval_start over eval_T, and the Bellman
  /// residual on the probe set. Evaluation uses forked streams so it does not
  /// perturb the training stream. A diverging evaluation rollout records an
  /// infinite eval cost instead of aborting.
  CurveRow evaluate();

  long iteration() const { return iteration_; }
  double last_loss() const { return last_loss_; }

  EnvironmentSpec env;
  TrainConfig cfg;
  QNetworkParams params;
  TargetParams target;
  AdamState adam;
  RngState rng;  // training stream: K samples, then any zero-gradient draws
  LearningCurve curve;
  std::vector<AugmentedState> bellman_probe_set;

 private:
  long iteration_ = 0;
  double last_loss_ = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
  QNetworkParams params;
  TargetParams target;
  AdamState adam;
  LearningCurve curve;
};

/// Runs N iterations with a curve row at iteration 0, every eval_every
/// iterations, and at N. Fully deterministic given cfg.seed.
TrainResult train(const EnvironmentSpec& env, const TrainConfig& cfg);

}  // namespace ctql
