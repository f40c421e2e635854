#include "ctql/odeint.hpp"

#include <cmath>

#include "ctql/common.hpp"
#include "ctql/csv.hpp"

namespace ctql {

namespace {

constexpr double kStateCap = 1e6;
constexpr double kRateTol = 1e-9;

// Augmented derivative (dx, du, dcost) at window-local time s.
struct Derivative {
  std::vector<double> dx, du;
  double dcost = 0.0;
};

class Stepper {
 public:
  Stepper(const EnvironmentSpec& env, const RatePolicy& policy)
      : env_(env), policy_(policy) {
    query_.x.resize(static_cast<std::size_t>(env.n));
    query_.u.resize(static_cast<std::size_t>(env.m));
  }

  Derivative eval(const std::vector<double>& x, const std::vector<double>& u, double s) {
    query_.x = x;
    query_.u = u;
    Derivative d;
    d.dx.assign(x.size(), 0.0);
    matvec_add(env_.A, x.data(), d.dx.data());
    matvec_add(env_.B, u.data(), d.dx.data());
    d.du = policy_(query_);
    if (static_cast<int>(d.du.size()) != env_.m)
      throw contract_error("rollout: policy returned a rate of wrong dimension");
    const double rate = norm2(d.du);
    if (!std::isfinite(rate) || rate > env_.M + kRateTol)
      throw contract_error("rollout: policy control rate exceeds the bound M");
    d.dcost = std::exp(-env_.gamma * s) * running_cost(env_, query_);
    return d;
  }

 private:
  const EnvironmentSpec& env_;
  const RatePolicy& policy_;
  AugmentedState query_;
};

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

std::vector<double> shifted(const std::vector<double>& base, double a, const std::vector<double>& d) {
  std::vector<double> out = base;
  axpy(out, a, d);
  return out;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (substeps < 1) throw contract_error("integrator: substeps must be >= 1");
  if (!(h > 0.0)) throw contract_error("integrator: h must be > 0");
}

RolloutResult rollout_step(const EnvironmentSpec& env, const AugmentedState& z0,
                           const RatePolicy& policy, const IntegratorConfig& cfg) {
  env.validate();
  cfg.validate();
  if (static_cast<int>(z0.x.size()) != env.n || static_cast<int>(z0.u.size()) != env.m)
    throw contract_error("rollout_step: initial state dimensions do not match the environment");

  Stepper stepper(env, policy);
  std::vector<double> x = z0.x, u = z0.u;
  double cost = 0.0;
  const double dt = cfg.h / cfg.substeps;

  for (int k = 0; k < cfg.substeps; ++k) {
    const double s0 = k * dt;
    Derivative k1 = stepper.eval(x, u, s0);
    Derivative k2 = stepper.eval(shifted(x, 0.5 * dt, k1.dx), shifted(u, 0.5 * dt, k1.du), s0 + 0.5 * dt);
    Derivative k3 = stepper.eval(shifted(x, 0.5 * dt, k2.dx), shifted(u, 0.5 * dt, k2.du), s0 + 0.5 * dt);
    Derivative k4 = stepper.eval(shifted(x, dt, k3.dx), shifted(u, dt, k3.du), s0 + dt);

    const double w = dt / 6.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] += w * (k1.dx[i] + 2.0 * k2.dx[i] + 2.0 * k3.dx[i] + k4.dx[i]);
    for (std::size_t i = 0; i < u.size(); ++i)
      u[i] += w * (k1.du[i] + 2.0 * k2.du[i] + 2.0 * k3.du[i] + k4.du[i]);
    cost += w * (k1.dcost + 2.0 * k2.dcost + 2.0 * k3.dcost + k4.dcost);

    if (!all_finite(x) || !all_finite(u) || !std::isfinite(cost) ||
        max_abs(x) > kStateCap || max_abs(u) > kStateCap)
      throw divergence_error("rollout_step: non-finite or exploding state", k);
  }
  return RolloutResult{cost, AugmentedState{std::move(x), std::move(u)}};
}

RolloutResult rollout_span(const EnvironmentSpec& env, const AugmentedState& z0,
                           const RatePolicy& policy, double T, const IntegratorConfig& cfg) {
  if (!(T > 0.0)) throw contract_error("rollout_span: T must be > 0");
  cfg.validate();
  const long windows = static_cast<long>(std::ceil(T / cfg.h - 1e-9));
  RolloutResult acc;
  acc.z_end = z0;
  for (long w = 0; w < windows; ++w) {
    const double start = w * cfg.h;
    IntegratorConfig window = cfg;
    window.h = std::min(cfg.h, T - start);
    if (window.h <= 0.0) break;
    RolloutResult r = rollout_step(env, acc.z_end, policy, window);
    acc.discounted_cost += std::exp(-env.gamma * start) * r.discounted_cost;
    acc.z_end = std::move(r.z_end);
  }
  return acc;
}

double evaluate_policy(const EnvironmentSpec& env, const AugmentedState& z0,
                       const RatePolicy& policy, double T_eval, const IntegratorConfig& cfg) {
  return rollout_span(env, z0, policy, T_eval, cfg).discounted_cost;
}

std::vector<TrajectorySample> trajectory_record(const EnvironmentSpec& env,
                                                const AugmentedState& z0,
                                                const RatePolicy& policy, double T_eval,
                                                const IntegratorConfig& cfg, double sample_dt) {
  if (!(sample_dt > 0.0)) throw contract_error("trajectory_record: sample_dt must be > 0");
  if (!(T_eval > 0.0)) throw contract_error("trajectory_record: T_eval must be > 0");
  env.validate();
  cfg.validate();

  const long full = static_cast<long>(std::floor(T_eval / sample_dt + 1e-9));
  const bool lands = std::abs(full * sample_dt - T_eval) <= 1e-9 * std::max(1.0, T_eval);
  const long rows = lands ? full + 1 : full + 2;

  std::vector<TrajectorySample> out;
  out.reserve(static_cast<std::size_t>(rows));
  AugmentedState z = z0;
  for (long k = 0; k < rows; ++k) {
    const double t = (k == rows - 1) ? T_eval : k * sample_dt;
    TrajectorySample row;
    row.t = t;
    row.z = z;
    row.a = policy(z);
    out.push_back(std::move(row));
    if (k == rows - 1) break;
    const double t_next = (k + 1 == rows - 1) ? T_eval : (k + 1) * sample_dt;
    IntegratorConfig window = cfg;
    window.h = t_next - t;
    if (window.h <= 0.0) continue;
    z = rollout_step(env, z, policy, window).z_end;
  }
  return out;
}

void write_trajectory_csv(const std::string& path, const std::vector<TrajectorySample>& rows) {
  if (rows.empty()) throw contract_error("write_trajectory_csv: no rows");
  const std::size_t n = rows.front().z.x.size();
  const std::size_t m = rows.front().z.u.size();
  std::vector<std::string> header{"t"};
  for (std::size_t i = 0; i < n; ++i) header.push_back("x_" + std::to_string(i));
  for (std::size_t i = 0; i < m; ++i) header.push_back("u_" + std::to_string(i));
  for (std::size_t i = 0; i < m; ++i) header.push_back("a_" + std::to_string(i));
  CsvWriter csv(path, header);
  for (const auto& row : rows) {
    std::vector<double> vals;
    vals.reserve(1 + n + 2 * m);
    vals.push_back(row.t);
    vals.insert(vals.end(), row.z.x.begin(), row.z.x.end());
    vals.insert(vals.end(), row.z.u.begin(), row.z.u.end());
    vals.insert(vals.end(), row.a.begin(), row.a.end());
    csv.row_numeric(vals);
  }
  csv.close();
}

}  // namespace ctql
