#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ctql/env.hpp"

namespace ctql {

/// State-feedback control-rate law a(z) with |a| <= M.
using RatePolicy = std::function<std::vector<double>(const AugmentedState&)>;

struct RolloutResult {
  double discounted_cost = 0.0;  // integral of e^{-gamma t} r over the window
  AugmentedState z_end;
};

struct IntegratorConfig {
  int substeps = 5;  // classical RK4 steps per window of length h
  double h = 0.05;   // rollout window length
  void validate() const;
};

/// Integrates z' = (A x + B u, a(z)) over [0, cfg.h] with classical RK4,
/// accumulating the discounted running cost as an extra state component under
/// the same tableau. The policy is queried at every RK4 stage point and must
/// return rates with |a| <= M + 1e-9 (contract_error otherwise). Non-finite
/// state or |z|_inf > 1e6 raises divergence_error carrying the substep index.
RolloutResult rollout_step(const EnvironmentSpec& env, const AugmentedState& z0,
                           const RatePolicy& policy, const IntegratorConfig& cfg);

/// Chains rollout_step windows of length cfg.h (final window shortened to hit
/// T exactly), composing window costs with e^{-gamma * window_start} factors.
RolloutResult rollout_span(const EnvironmentSpec& env, const AugmentedState& z0,
                           const RatePolicy& policy, double T, const IntegratorConfig& cfg);

/// Total discounted cost of the closed-loop trajectory over [0, T_eval].
double evaluate_policy(const EnvironmentSpec& env, const AugmentedState& z0,
                       const RatePolicy& policy, double T_eval, const IntegratorConfig& cfg);

struct TrajectorySample {
  double t = 0.0;
  AugmentedState z;
  std::vector<double> a;  // policy output at the sample point
};

/// Closed-loop trajectory sampled every sample_dt; the first row is t = 0 and
/// the last row lands on T_eval (appended exactly if the grid does not).
std::vector<TrajectorySample> trajectory_record(const EnvironmentSpec& env,
                                                const AugmentedState& z0,
                                                const RatePolicy& policy, double T_eval,
                                                const IntegratorConfig& cfg, double sample_dt);

/// Header `t,x_0..x_{n-1},u_0..u_{m-1},a_0..a_{m-1}`, fields via fmt_g17.
void write_trajectory_csv(const std::string& path, const std::vector<TrajectorySample>& rows);

}  // namespace ctql
