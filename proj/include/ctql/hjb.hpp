#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctql/common.hpp"
#include "ctql/env.hpp"
#include "ctql/odeint.hpp"

namespace ctql {

struct AxisSpec {
  double min = 0.0;
  double max = 1.0;
  int points = 2;
  double spacing() const { return (max - min) / (points - 1); }
};

/// Tensor-product grid over the augmented state: n state axes followed by m
/// control axes. Flat node index is row-major with the last axis fastest.
struct GridSpec {
  std::vector<AxisSpec> axes;

  long node_count() const;
  void validate() const;
  std::vector<double> node_coords(long flat_index) const;

  /// Grid over the environment box with every extent scaled by `scale` about
  /// the origin and `points` nodes per axis.
  static GridSpec box(const EnvironmentSpec& env, int points, double scale = 1.0);
};

struct GridMeta {
  double gamma = 0.0;
  double M = 0.0;
  double delta = 0.0;  // scheme step (pseudo-time for the stationary solve)
  long iterations = 0;
  double final_update = 0.0;
  bool converged = false;
  double horizon_T = 0.0;  // finite-horizon runs only
};

/// Grid values of the Q-function. Stationary solutions hold one slice;
/// finite-horizon solutions hold time_slices = steps + 1 slices, slice k at
/// time k * (T / steps), slice-major in `values`.
struct GridSolution {
  GridSpec grid;
  int time_slices = 1;
  std::vector<double> values;
  GridMeta meta;

  void validate() const;
  const double* slice(int k) const { return values.data() + static_cast<std::size_t>(k) * grid.node_count(); }
};

/// Finite set of candidate control rates with |a| <= M. For m = 1 this is
/// {-M, 0, +M} (just {0} when M = 0); for m = 2, `directions` unit directions
/// plus zero; for m = 3, a Fibonacci-sphere direction set plus zero.
struct ControlRateSet {
  std::vector<std::vector<double>> rates;
};
ControlRateSet make_rate_set(int m, double M, int directions = 16);

/// Multilinear interpolation of the (stationary) value tensor; queries outside
/// the box are clamped onto it.
double interpolate(const GridSolution& sol, const AugmentedState& z);
double interpolate_slice(const GridSolution& sol, int slice, const AugmentedState& z);

/// CFL-like accuracy default: half the smallest grid spacing divided by the
/// largest component of the augmented vector field over the grid box.
double auto_delta(const EnvironmentSpec& env, const GridSpec& grid);

/// One application of the discounted semi-Lagrangian dynamic-programming
/// operator: (T q)(z) = cost(z) + disc * min_a interp(q, foot(z, a)) with
/// foot(z, a) one RK4 step of the augmented dynamics and, for the stationary
/// problem, cost(z) = r(z) (1 - e^{-gamma delta}) / gamma, disc = e^{-gamma
/// delta}. Stencils are precomputed per (node, rate), so apply() is a gather.
class SemiLagrangianOperator {
 public:
  /// `precompute` builds the per-node gather stencils apply() needs; pass
  /// false for query-only use (step_value / greedy_rate_index).
  static SemiLagrangianOperator stationary(const EnvironmentSpec& env, const GridSpec& grid,
                                           double delta, const ControlRateSet& rates,
                                           bool precompute = true);
  /// Undiscounted one-step operator for backward time marching:
  /// cost(z) = r(z) * dt, disc = 1.
  static SemiLagrangianOperator finite_step(const EnvironmentSpec& env, const GridSpec& grid,
                                            double dt, const ControlRateSet& rates,
                                            bool precompute = true);

  void apply(const std::vector<double>& in, std::vector<double>& out) const;

  double delta() const { return delta_; }
  double discount() const { return discount_; }
  long node_count() const { return nodes_; }

  /// One-step look-ahead value / argmin at an arbitrary (clamped) query point.
  double step_value(const std::vector<double>& values, const AugmentedState& z, int rate_index) const;
  int greedy_rate_index(const std::vector<double>& values, const AugmentedState& z) const;

 private:
  SemiLagrangianOperator(const EnvironmentSpec& env, const GridSpec& grid, double delta,
                         const ControlRateSet& rates, bool discounted, bool precompute);

  void stencil_at(const double* foot, int* corners, double* weights) const;

  EnvironmentSpec env_;
  GridSpec grid_;
  ControlRateSet rates_;
  double delta_ = 0.0;
  double discount_ = 1.0;
  double cost_factor_ = 0.0;
  bool discounted_ = true;
  long nodes_ = 0;
  int dim_ = 0;
  int corners_ = 0;  // 2^dim
  std::vector<double> stage_cost_;   // per node
  std::vector<int> corner_index_;    // node * rates * corners
  std::vector<double> corner_weight_;
};

/// Iteration trace hook: called with (iteration, sup-norm update).
using ProgressFn = std::function<void(long, double)>;

/// Non-convergence within max_iter; carries the last update and the partial
/// solution so callers can persist it.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& msg, double last_update_, GridSolution partial_)
      : std::runtime_error(msg), last_update(last_update_), partial(std::move(partial_)) {}
  double last_update;
  GridSolution partial;
};

/// Value iteration of the stationary semi-Lagrangian operator until the
/// sup-norm update drops below tol. delta <= 0 selects auto_delta. `initial`
/// optionally warm-starts the iteration (defaults to r(z)/gamma).
GridSolution solve_infinite(const EnvironmentSpec& env, const GridSpec& grid, double delta,
                            const ControlRateSet& rates, double tol, long max_iter,
                            const std::vector<double>* initial = nullptr,
                            const ProgressFn& progress = {});

using TerminalCost = std::function<double(const std::vector<double>& x)>;

/// Backward march of the undiscounted finite-horizon equation from t = T with
/// Q(., T) = q(x) exactly on nodes; returns all time slices.
GridSolution solve_finite(const EnvironmentSpec& env, const TerminalCost& terminal_cost,
                          double T, int time_steps, const GridSpec& grid,
                          const ControlRateSet& rates);

/// Feedback law selecting the rate that minimizes the one-step look-ahead
/// cost at the query point; ties break to the lowest rate index.
RatePolicy grid_greedy_policy(const EnvironmentSpec& env, const GridSolution& sol,
                              const ControlRateSet& rates);

/// Stationary solves for each bound in M_list (strictly increasing); used to
/// study how the value shrinks as the admissible rate set grows.
std::vector<GridSolution> monotonicity_in_M(const EnvironmentSpec& env, const GridSpec& grid,
                                            const std::vector<double>& M_list, double delta,
                                            int directions, double tol, long max_iter);

/// Serialization: `base`.json holds grid, metadata and a pointer to the value
/// payload, written either as CSV (one value per line) or raw little-endian
/// 64-bit floats next to the header.
void save_grid_solution(const std::string& base_path, const GridSolution& sol, bool raw_values);
GridSolution load_grid_solution(const std::string& json_path);

}  // namespace ctql
