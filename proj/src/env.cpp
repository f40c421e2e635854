#include "ctql/env.hpp"

#include <cmath>
#include <string>

#include "ctql/common.hpp"

namespace ctql {

namespace {

void check_dims(const EnvironmentSpec& env, const AugmentedState& z, const char* where) {
  if (static_cast<int>(z.x.size()) != env.n || static_cast<int>(z.u.size()) != env.m)
    throw contract_error(std::string(where) + ": state dimensions do not match the environment");
}

Matrix matrix_from_list(const std::vector<double>& vals, int rows, int cols, const char* name) {
  if (static_cast<int>(vals.size()) != rows * cols)
    throw contract_error(std::string("matrix ") + name + ": expected " +
                         std::to_string(rows * cols) + " entries, got " +
                         std::to_string(vals.size()));
  Matrix out(rows, cols);
  out.data = vals;
  return out;
}

}  // namespace

std::vector<double> flatten(const AugmentedState& z) {
  std::vector<double> out;
  out.reserve(z.x.size() + z.u.size());
  out.insert(out.end(), z.x.begin(), z.x.end());
  out.insert(out.end(), z.u.begin(), z.u.end());
  return out;
}

AugmentedState unflatten(const std::vector<double>& z, int n, int m) {
  if (static_cast<int>(z.size()) != n + m)
    throw contract_error("unflatten: vector length does not equal n + m");
  AugmentedState out;
  out.x.assign(z.begin(), z.begin() + n);
  out.u.assign(z.begin() + n, z.end());
  return out;
}

void EnvironmentSpec::validate() const {
  if (n < 1 || m < 1) throw contract_error("environment: n and m must be >= 1");
  if (!(gamma > 0.0)) throw contract_error("environment: gamma must be > 0");
  if (!(M >= 0.0)) throw contract_error("environment: M must be >= 0");
  if (!(x_min < x_max)) throw contract_error("environment: x_min must be < x_max");
  if (!(u_min < u_max)) throw contract_error("environment: u_min must be < u_max");
  if (A.rows != n || A.cols != n)
    throw contract_error("environment: A must be n x n");
  if (B.rows != n || B.cols != m)
    throw contract_error("environment: B must be n x m");
  if (!(cost_scale >= 0.0)) throw contract_error("environment: cost_scale must be >= 0");
  if (!all_finite(A.data) || !all_finite(B.data))
    throw contract_error("environment: A and B must be finite");
}

std::vector<double> dynamics_eval(const EnvironmentSpec& env, const AugmentedState& z) {
  check_dims(env, z, "dynamics_eval");
  std::vector<double> dx(static_cast<std::size_t>(env.n), 0.0);
  matvec_add(env.A, z.x.data(), dx.data());
  matvec_add(env.B, z.u.data(), dx.data());
  return dx;
}

double running_cost(const EnvironmentSpec& env, const AugmentedState& z) {
  check_dims(env, z, "running_cost");
  double acc = 0.0;
  for (double v : z.x) acc += v * v;
  for (double v : z.u) acc += v * v;
  return env.cost_scale * acc;
}

EnvironmentSpec make_lqr_1d() {
  EnvironmentSpec env;
  env.n = 1;
  env.m = 1;
  env.A = Matrix(1, 1, 0.0);
  env.B = Matrix(1, 1, 1.0);
  env.gamma = 0.1;
  env.M = 1.0;
  env.validate();
  return env;
}

EnvironmentSpec make_random_lqr(int n, int m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw contract_error("make_random_lqr: n and m must be >= 1");
  EnvironmentSpec env;
  env.n = n;
  env.m = m;
  env.A = Matrix(n, n);
  env.B = Matrix(n, m);
  RngState rng = rng_stream(seed, stream_tag::env_matrices);
  for (double& a : env.A.data) a = 0.1 * uniform01(rng);
  for (double& b : env.B.data) b = 5.0 * uniform01(rng);
  env.gamma = 0.1;
  env.M = 1.0;
  env.validate();
  return env;
}

std::vector<AugmentedState> sample_domain(const EnvironmentSpec& env, int count, RngState& rng) {
  env.validate();
  if (count < 1) throw contract_error("sample_domain: count must be >= 1");
  std::vector<AugmentedState> out(static_cast<std::size_t>(count));
  for (auto& z : out) {
    z.x.resize(static_cast<std::size_t>(env.n));
    z.u.resize(static_cast<std::size_t>(env.m));
    for (double& v : z.x) v = uniform(rng, env.x_min, env.x_max);
    for (double& v : z.u) v = uniform(rng, env.u_min, env.u_max);
  }
  return out;
}

EnvironmentSpec env_from_config(const Config& cfg) {
  const std::string preset = cfg.get_string("preset", "lqr1d");
  EnvironmentSpec env;
  if (preset == "lqr1d") {
    env = make_lqr_1d();
  } else if (preset == "lqr_random") {
    int n = cfg.get_int("n", 10);
    int m = cfg.get_int("m", n);
    env = make_random_lqr(n, m, cfg.get_u64("seed", 0));
  } else {
    throw config_error("unknown preset '" + preset + "' (expected lqr1d or lqr_random)");
  }

  env.n = cfg.get_int("n", env.n);
  env.m = cfg.get_int("m", env.m);
  env.gamma = cfg.get_double("gamma", env.gamma);
  env.M = cfg.get_double("M", env.M);
  env.x_min = cfg.get_double("x_min", env.x_min);
  env.x_max = cfg.get_double("x_max", env.x_max);
  env.u_min = cfg.get_double("u_min", env.u_min);
  env.u_max = cfg.get_double("u_max", env.u_max);
  env.cost_scale = cfg.get_double("cost_scale", env.cost_scale);
  if (cfg.has("A")) env.A = matrix_from_list(cfg.get_double_list("A"), env.n, env.n, "A");
  if (cfg.has("B")) env.B = matrix_from_list(cfg.get_double_list("B"), env.n, env.m, "B");
  env.validate();
  return env;
}

}  // namespace ctql
