#pragma once

#include <cstdint>
#include <vector>

#include "ctql/config.hpp"
#include "ctql/matrix.hpp"
#include "ctql/rng.hpp"

namespace ctql {

/// Joint state of the extended system: the plant state x together with the
/// current control value u. The control rate a (|a| <= M) is the input.
struct AugmentedState {
  std::vector<double> x;
  std::vector<double> u;
};

std::vector<double> flatten(const AugmentedState& z);
AugmentedState unflatten(const std::vector<double>& z, int n, int m);

/// Linear plant x' = A x + B u with quadratic running cost
/// cost_scale * (|x|^2 + |u|^2), exponential discount rate gamma, and a bound
/// M on the control rate |u'|. The box [x_min,x_max]^n x [u_min,u_max]^m is
/// the sampling domain for training and the reference region for the grid
/// solver.
struct EnvironmentSpec {
  int n = 1;  // state dimension
  int m = 1;  // control dimension
  Matrix A;   // n x n
  Matrix B;   // n x m
  double gamma = 0.1;  // discount rate, > 0
  double M = 1.0;      // control-rate bound, >= 0
  double x_min = -1.0, x_max = 1.0;
  double u_min = -1.0, u_max = 1.0;
  double cost_scale = 1.0;  // 0 gives the zero-cost system used in tests

  void validate() const;  // throws contract_error
};

/// A x + B u.
std::vector<double> dynamics_eval(const EnvironmentSpec& env, const AugmentedState& z);

/// cost_scale * (|x|^2 + |u|^2), squared Euclidean norms.
double running_cost(const EnvironmentSpec& env, const AugmentedState& z);

/// n = m = 1, A = 0, B = 1, gamma = 0.1, M = 1, unit box.
EnvironmentSpec make_lqr_1d();

/// A_ij = 0.1 X_ij, B_ij = 5 Y_ij with X, Y iid uniform on [0,1) drawn from a
/// splitmix64 stream keyed by `seed` (A first, then B, both row-major).
/// gamma = 0.1, M = 1, unit box.
EnvironmentSpec make_random_lqr(int n, int m, std::uint64_t seed);

/// `count` points uniform on the sampling box, coordinates drawn x then u in
/// axis order; advances `rng` deterministically.
std::vector<AugmentedState> sample_domain(const EnvironmentSpec& env, int count, RngState& rng);

// Config keys understood by env_from_config: preset (lqr1d | lqr_random), n,
// m, seed, gamma, M, x_min, x_max, u_min, u_max, cost_scale, and optional
// inline matrices A, B as row-major comma-separated lists.
EnvironmentSpec env_from_config(const Config& cfg);

}  // namespace ctql
