#include "ctql/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>

#include <json.hpp>

#include "ctql/common.hpp"
#include "ctql/csv.hpp"

namespace ctql {

namespace {

using nlohmann::json;

constexpr int kHardAxisCap = 4;

void check_capacity(const EnvironmentSpec& env) {
  const int d = env.n + env.m;
  if (d > kHardAxisCap)
    throw contract_error("grid solver: n + m = " + std::to_string(d) +
                         " exceeds the hard cap of " + std::to_string(kHardAxisCap));
  if (d >= 3)
    std::fprintf(stderr,
                 "ctql: warning: grid solver running with n + m = %d axes; "
                 "intended for n = m = 1\n",
                 d);
}

// One classical RK4 step of the augmented field (A x + B u, a) with a held
// constant; foot[] receives the n+m successor coordinates.
void rk4_foot(const EnvironmentSpec& env, const double* z, const double* a, double dt,
              double* foot) {
  const int n = env.n, m = env.m;
  const int d = n + m;
  std::vector<double> y(z, z + d), k1(d), k2(d), k3(d), k4(d), tmp(d);

  auto deriv = [&](const double* state, double* out) {
    std::fill(out, out + n, 0.0);
    matvec_add(env.A, state, out);
    matvec_add(env.B, state + n, out);
    for (int i = 0; i < m; ++i) out[n + i] = a[i];
  };

  deriv(y.data(), k1.data());
  for (int i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  deriv(tmp.data(), k2.data());
  for (int i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  deriv(tmp.data(), k3.data());
  for (int i = 0; i < d; ++i) tmp[i] = y[i] + dt * k3[i];
  deriv(tmp.data(), k4.data());
  for (int i = 0; i < d; ++i)
    foot[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

}  // namespace

long GridSpec::node_count() const {
  long count = 1;
  for (const AxisSpec& ax : axes) count *= ax.points;
  return count;
}

void GridSpec::validate() const {
  if (axes.empty()) throw contract_error("grid: no axes");
  for (const AxisSpec& ax : axes) {
    if (ax.points < 2) throw contract_error("grid: every axis needs at least 2 points");
    if (!(ax.min < ax.max)) throw contract_error("grid: axis min must be < max");
  }
}

std::vector<double> GridSpec::node_coords(long flat_index) const {
  std::vector<double> coords(axes.size());
  long rem = flat_index;
  for (std::size_t a = axes.size(); a-- > 0;) {
    const long idx = rem % axes[a].points;
    rem /= axes[a].points;
    coords[a] = axes[a].min + idx * axes[a].spacing();
  }
  return coords;
}

GridSpec GridSpec::box(const EnvironmentSpec& env, int points, double scale) {
  GridSpec g;
  for (int i = 0; i < env.n; ++i)
    g.axes.push_back({scale * env.x_min, scale * env.x_max, points});
  for (int i = 0; i < env.m; ++i)
    g.axes.push_back({scale * env.u_min, scale * env.u_max, points});
  g.validate();
  return g;
}

void GridSolution::validate() const {
  grid.validate();
  if (time_slices < 1) throw contract_error("grid solution: time_slices must be >= 1");
  if (static_cast<long>(values.size()) != grid.node_count() * time_slices)
    throw contract_error("grid solution: value tensor length does not match the grid");
  if (!all_finite(values)) throw contract_error("grid solution: non-finite value");
}

ControlRateSet make_rate_set(int m, double M, int directions) {
  if (m < 1) throw contract_error("make_rate_set: m must be >= 1");
  if (M < 0.0) throw contract_error("make_rate_set: M must be >= 0");
  ControlRateSet set;
  if (M == 0.0) {
    set.rates.push_back(std::vector<double>(static_cast<std::size_t>(m), 0.0));
    return set;
  }
  if (m == 1) {
    set.rates = {{-M}, {0.0}, {M}};
    return set;
  }
  if (directions < 2) throw contract_error("make_rate_set: need at least 2 directions");
  if (m == 2) {
    for (int k = 0; k < directions; ++k) {
      const double ang = 2.0 * 3.14159265358979323846 * k / directions;
      set.rates.push_back({M * std::cos(ang), M * std::sin(ang)});
    }
  } else if (m == 3) {
    // Fibonacci sphere: near-uniform deterministic directions.
    const double golden = 3.14159265358979323846 * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < directions; ++k) {
      const double y = 1.0 - 2.0 * (k + 0.5) / directions;
      const double rad = std::sqrt(std::max(0.0, 1.0 - y * y));
      const double ang = golden * k;
      set.rates.push_back({M * rad * std::cos(ang), M * y, M * rad * std::sin(ang)});
    }
  } else {
    throw contract_error("make_rate_set: m > 3 not supported by the grid solver");
  }
  set.rates.push_back(std::vector<double>(static_cast<std::size_t>(m), 0.0));
  return set;
}

namespace {

double interpolate_values(const GridSpec& grid, const double* values, const double* point) {
  const int d = static_cast<int>(grid.axes.size());
  int cell[4];
  double frac[4];
  for (int a = 0; a < d; ++a) {
    const AxisSpec& ax = grid.axes[a];
    double p = std::clamp(point[a], ax.min, ax.max);
    double rel = (p - ax.min) / ax.spacing();
    int idx = std::clamp(static_cast<int>(std::floor(rel)), 0, ax.points - 2);
    cell[a] = idx;
    frac[a] = std::clamp(rel - idx, 0.0, 1.0);
  }
  // Strides, last axis fastest.
  long stride[4];
  long s = 1;
  for (int a = d; a-- > 0;) {
    stride[a] = s;
    s *= grid.axes[a].points;
  }
  double acc = 0.0;
  const int corners = 1 << d;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    long idx = 0;
    for (int a = 0; a < d; ++a) {
      const int hi = (c >> a) & 1;
      w *= hi ? frac[a] : 1.0 - frac[a];
      idx += (cell[a] + hi) * stride[a];
    }
    acc += w * values[idx];
  }
  return acc;
}

}  // namespace

double interpolate(const GridSolution& sol, const AugmentedState& z) {
  return interpolate_slice(sol, 0, z);
}

double interpolate_slice(const GridSolution& sol, int slice, const AugmentedState& z) {
  if (slice < 0 || slice >= sol.time_slices)
    throw contract_error("interpolate: slice out of range");
  const std::vector<double> point = flatten(z);
  if (static_cast<int>(point.size()) != static_cast<int>(sol.grid.axes.size()))
    throw contract_error("interpolate: query dimension does not match the grid");
  return interpolate_values(sol.grid, sol.slice(slice), point.data());
}

double auto_delta(const EnvironmentSpec& env, const GridSpec& grid) {
  // Componentwise bound of |A x + B u| over the grid box via absolute row sums.
  double max_f = 0.0;
  for (int r = 0; r < env.n; ++r) {
    double row = 0.0;
    for (int c = 0; c < env.n; ++c) {
      const AxisSpec& ax = grid.axes[static_cast<std::size_t>(c)];
      row += std::abs(env.A(r, c)) * std::max(std::abs(ax.min), std::abs(ax.max));
    }
    for (int c = 0; c < env.m; ++c) {
      const AxisSpec& ax = grid.axes[static_cast<std::size_t>(env.n + c)];
      row += std::abs(env.B(r, c)) * std::max(std::abs(ax.min), std::abs(ax.max));
    }
    max_f = std::max(max_f, row);
  }
  max_f = std::max(max_f, env.M);
  double min_spacing = std::numeric_limits<double>::infinity();
  for (const AxisSpec& ax : grid.axes) min_spacing = std::min(min_spacing, ax.spacing());
  if (max_f <= 0.0) return min_spacing;
  return 0.5 * min_spacing / max_f;
}

SemiLagrangianOperator SemiLagrangianOperator::stationary(const EnvironmentSpec& env,
                                                          const GridSpec& grid, double delta,
                                                          const ControlRateSet& rates,
                                                          bool precompute) {
  return SemiLagrangianOperator(env, grid, delta, rates, true, precompute);
}

SemiLagrangianOperator SemiLagrangianOperator::finite_step(const EnvironmentSpec& env,
                                                           const GridSpec& grid, double dt,
                                                           const ControlRateSet& rates,
                                                           bool precompute) {
  return SemiLagrangianOperator(env, grid, dt, rates, false, precompute);
}

SemiLagrangianOperator::SemiLagrangianOperator(const EnvironmentSpec& env, const GridSpec& grid,
                                               double delta, const ControlRateSet& rates,
                                               bool discounted, bool precompute)
    : env_(env), grid_(grid), rates_(rates), discounted_(discounted) {
  env_.validate();
  grid_.validate();
  check_capacity(env_);
  if (static_cast<int>(grid_.axes.size()) != env_.n + env_.m)
    throw contract_error("grid solver: grid axes must cover the n + m augmented axes");
  if (rates_.rates.empty()) throw contract_error("grid solver: empty rate set");
  for (const auto& a : rates_.rates) {
    if (static_cast<int>(a.size()) != env_.m)
      throw contract_error("grid solver: rate dimension mismatch");
    if (norm2(a) > env_.M + 1e-12)
      throw contract_error("grid solver: rate magnitude exceeds M");
  }
  delta_ = delta > 0.0 ? delta : auto_delta(env_, grid_);
  if (!(delta_ > 0.0)) throw contract_error("grid solver: scheme step must be > 0");

  dim_ = env_.n + env_.m;
  corners_ = 1 << dim_;
  nodes_ = grid_.node_count();
  const int R = static_cast<int>(rates_.rates.size());

  if (discounted_) {
    discount_ = std::exp(-env_.gamma * delta_);
    cost_factor_ = (1.0 - discount_) / env_.gamma;  // exact for a frozen integrand
  } else {
    discount_ = 1.0;
    cost_factor_ = delta_;
  }
  if (!precompute) return;

  stage_cost_.resize(static_cast<std::size_t>(nodes_));
  corner_index_.resize(static_cast<std::size_t>(nodes_) * R * corners_);
  corner_weight_.resize(static_cast<std::size_t>(nodes_) * R * corners_);

  AugmentedState z;
  z.x.resize(static_cast<std::size_t>(env_.n));
  z.u.resize(static_cast<std::size_t>(env_.m));
  std::vector<double> foot(static_cast<std::size_t>(dim_));
  for (long node = 0; node < nodes_; ++node) {
    const std::vector<double> coords = grid_.node_coords(node);
    std::copy(coords.begin(), coords.begin() + env_.n, z.x.begin());
    std::copy(coords.begin() + env_.n, coords.end(), z.u.begin());
    stage_cost_[static_cast<std::size_t>(node)] = cost_factor_ * running_cost(env_, z);
    for (int r = 0; r < R; ++r) {
      rk4_foot(env_, coords.data(), rates_.rates[static_cast<std::size_t>(r)].data(), delta_,
               foot.data());
      const std::size_t base = (static_cast<std::size_t>(node) * R + r) * corners_;
      stencil_at(foot.data(), corner_index_.data() + base, corner_weight_.data() + base);
    }
  }
}

void SemiLagrangianOperator::stencil_at(const double* foot, int* corners, double* weights) const {
  int cell[4];
  double frac[4];
  for (int a = 0; a < dim_; ++a) {
    const AxisSpec& ax = grid_.axes[static_cast<std::size_t>(a)];
    double p = std::clamp(foot[a], ax.min, ax.max);
    double rel = (p - ax.min) / ax.spacing();
    int idx = std::clamp(static_cast<int>(std::floor(rel)), 0, ax.points - 2);
    cell[a] = idx;
    frac[a] = std::clamp(rel - idx, 0.0, 1.0);
  }
  long stride[4];
  long s = 1;
  for (int a = dim_; a-- > 0;) {
    stride[a] = s;
    s *= grid_.axes[static_cast<std::size_t>(a)].points;
  }
  for (int c = 0; c < corners_; ++c) {
    double w = 1.0;
    long idx = 0;
    for (int a = 0; a < dim_; ++a) {
      const int hi = (c >> a) & 1;
      w *= hi ? frac[a] : 1.0 - frac[a];
      idx += (cell[a] + hi) * stride[a];
    }
    corners[c] = static_cast<int>(idx);
    weights[c] = w;
  }
}

void SemiLagrangianOperator::apply(const std::vector<double>& in, std::vector<double>& out) const {
  if (static_cast<long>(in.size()) != nodes_)
    throw contract_error("semi-Lagrangian apply: tensor length does not match the grid");
  if (stage_cost_.empty())
    throw contract_error("semi-Lagrangian apply: operator built without precomputed stencils");
  out.resize(in.size());
  const int R = static_cast<int>(rates_.rates.size());
  const double* q = in.data();
  for (long node = 0; node < nodes_; ++node) {
    const std::size_t base = static_cast<std::size_t>(node) * R * corners_;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < R; ++r) {
      const std::size_t off = base + static_cast<std::size_t>(r) * corners_;
      double acc = 0.0;
      for (int c = 0; c < corners_; ++c)
        acc += corner_weight_[off + c] * q[corner_index_[off + c]];
      best = std::min(best, acc);
    }
    out[static_cast<std::size_t>(node)] =
        stage_cost_[static_cast<std::size_t>(node)] + discount_ * best;
  }
}

double SemiLagrangianOperator::step_value(const std::vector<double>& values,
                                          const AugmentedState& z, int rate_index) const {
  const std::vector<double> coords = flatten(z);
  std::vector<double> foot(static_cast<std::size_t>(dim_));
  rk4_foot(env_, coords.data(), rates_.rates[static_cast<std::size_t>(rate_index)].data(), delta_,
           foot.data());
  const double cont = interpolate_values(grid_, values.data(), foot.data());
  return cost_factor_ * running_cost(env_, z) + discount_ * cont;
}

int SemiLagrangianOperator::greedy_rate_index(const std::vector<double>& values,
                                              const AugmentedState& z) const {
  int best_index = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < static_cast<int>(rates_.rates.size()); ++r) {
    const double v = step_value(values, z, r);
    if (v < best) {  // strict: ties keep the lowest index
      best = v;
      best_index = r;
    }
  }
  return best_index;
}

GridSolution solve_infinite(const EnvironmentSpec& env, const GridSpec& grid, double delta,
                            const ControlRateSet& rates, double tol, long max_iter,
                            const std::vector<double>* initial, const ProgressFn& progress) {
  if (!(tol > 0.0)) throw contract_error("solve_infinite: tol must be > 0");
  if (max_iter < 1) throw contract_error("solve_infinite: max_iter must be >= 1");
  SemiLagrangianOperator op = SemiLagrangianOperator::stationary(env, grid, delta, rates);

  std::vector<double> q;
  if (initial) {
    if (static_cast<long>(initial->size()) != op.node_count())
      throw contract_error("solve_infinite: initial tensor length does not match the grid");
    q = *initial;
  } else {
    // r(z) / gamma: the exact value when nothing moves; a cheap warm start.
    q.resize(static_cast<std::size_t>(op.node_count()));
    AugmentedState z;
    z.x.resize(static_cast<std::size_t>(env.n));
    z.u.resize(static_cast<std::size_t>(env.m));
    for (long node = 0; node < op.node_count(); ++node) {
      const std::vector<double> coords = grid.node_coords(node);
      std::copy(coords.begin(), coords.begin() + env.n, z.x.begin());
      std::copy(coords.begin() + env.n, coords.end(), z.u.begin());
      q[static_cast<std::size_t>(node)] = running_cost(env, z) / env.gamma;
    }
  }

  GridSolution sol;
  sol.grid = grid;
  sol.time_slices = 1;
  sol.meta.gamma = env.gamma;
  sol.meta.M = env.M;
  sol.meta.delta = op.delta();

  std::vector<double> next(q.size());
  double update = std::numeric_limits<double>::infinity();
  for (long it = 1; it <= max_iter; ++it) {
    op.apply(q, next);
    update = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
      update = std::max(update, std::abs(next[i] - q[i]));
    q.swap(next);
    if (progress) progress(it, update);
    if (update < tol) {
      sol.values = std::move(q);
      sol.meta.iterations = it;
      sol.meta.final_update = update;
      sol.meta.converged = true;
      sol.validate();
      return sol;
    }
  }
  sol.values = std::move(q);
  sol.meta.iterations = max_iter;
  sol.meta.final_update = update;
  sol.meta.converged = false;
  throw convergence_error("solve_infinite: no convergence within " + std::to_string(max_iter) +
                              " sweeps (last update " + fmt_g17(update) + ")",
                          update, std::move(sol));
}

GridSolution solve_finite(const EnvironmentSpec& env, const TerminalCost& terminal_cost,
                          double T, int time_steps, const GridSpec& grid,
                          const ControlRateSet& rates) {
  if (!(T > 0.0)) throw contract_error("solve_finite: T must be > 0");
  if (time_steps < 1) throw contract_error("solve_finite: time_steps must be >= 1");
  const double dt = T / time_steps;
  SemiLagrangianOperator op = SemiLagrangianOperator::finite_step(env, grid, dt, rates);

  const long nodes = grid.node_count();
  GridSolution sol;
  sol.grid = grid;
  sol.time_slices = time_steps + 1;
  sol.values.assign(static_cast<std::size_t>(nodes) * sol.time_slices, 0.0);
  sol.meta.gamma = env.gamma;
  sol.meta.M = env.M;
  sol.meta.delta = dt;
  sol.meta.horizon_T = T;
  sol.meta.converged = true;
  sol.meta.iterations = time_steps;

  // Terminal slice: q(x) exactly on nodes, constant in u.
  std::vector<double> slice(static_cast<std::size_t>(nodes));
  for (long node = 0; node < nodes; ++node) {
    const std::vector<double> coords = grid.node_coords(node);
    slice[static_cast<std::size_t>(node)] =
        terminal_cost(std::vector<double>(coords.begin(), coords.begin() + env.n));
  }
  std::copy(slice.begin(), slice.end(),
            sol.values.begin() + static_cast<std::size_t>(time_steps) * nodes);

  std::vector<double> prev(static_cast<std::size_t>(nodes));
  for (int k = time_steps; k-- > 0;) {
    op.apply(slice, prev);
    std::copy(prev.begin(), prev.end(), sol.values.begin() + static_cast<std::size_t>(k) * nodes);
    slice.swap(prev);
  }
  sol.validate();
  return sol;
}

RatePolicy grid_greedy_policy(const EnvironmentSpec& env, const GridSolution& sol,
                              const ControlRateSet& rates) {
  sol.validate();
  if (sol.time_slices != 1)
    throw contract_error("grid_greedy_policy: needs a stationary solution");
  auto op = std::make_shared<SemiLagrangianOperator>(
      SemiLagrangianOperator::stationary(env, sol.grid, sol.meta.delta, rates, /*precompute=*/false));
  auto values = std::make_shared<std::vector<double>>(sol.values);
  auto rate_list = std::make_shared<ControlRateSet>(rates);
  return [op, values, rate_list](const AugmentedState& z) {
    return rate_list->rates[static_cast<std::size_t>(op->greedy_rate_index(*values, z))];
  };
}

std::vector<GridSolution> monotonicity_in_M(const EnvironmentSpec& env, const GridSpec& grid,
                                            const std::vector<double>& M_list, double delta,
                                            int directions, double tol, long max_iter) {
  for (std::size_t i = 1; i < M_list.size(); ++i)
    if (!(M_list[i] > M_list[i - 1]))
      throw contract_error("monotonicity_in_M: M_list must be strictly increasing");
  std::vector<GridSolution> out;
  for (double M : M_list) {
    EnvironmentSpec e = env;
    e.M = M;
    out.push_back(solve_infinite(e, grid, delta, make_rate_set(env.m, M, directions), tol, max_iter));
  }
  return out;
}

void save_grid_solution(const std::string& base_path, const GridSolution& sol, bool raw_values) {
  const std::string values_name =
      base_path.substr(base_path.find_last_of('/') + 1) + (raw_values ? ".values.bin" : ".values.csv");
  const std::string values_path = base_path + (raw_values ? ".values.bin" : ".values.csv");

  json j;
  j["format"] = "ctql-grid-v1";
  json axes = json::array();
  for (const AxisSpec& ax : sol.grid.axes)
    axes.push_back({{"min", ax.min}, {"max", ax.max}, {"points", ax.points}});
  j["axes"] = axes;
  j["time_slices"] = sol.time_slices;
  j["metadata"] = {{"gamma", sol.meta.gamma},       {"M", sol.meta.M},
                   {"delta", sol.meta.delta},       {"iterations", sol.meta.iterations},
                   {"final_update", sol.meta.final_update}, {"converged", sol.meta.converged},
                   {"horizon_T", sol.meta.horizon_T}};
  j["values_file"] = values_name;
  j["values_format"] = raw_values ? "raw" : "csv";
  j["count"] = sol.values.size();

  std::ofstream header(base_path + ".json");
  if (!header) throw io_error("cannot open for writing: " + base_path + ".json");
  header << j.dump(2) << '\n';
  if (!header) throw io_error("write failure on " + base_path + ".json");

  if (raw_values) {
    static_assert(sizeof(double) == 8);
    std::ofstream out(values_path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + values_path);
    out.write(reinterpret_cast<const char*>(sol.values.data()),
              static_cast<std::streamsize>(sol.values.size() * sizeof(double)));
    if (!out) throw io_error("write failure on " + values_path);
  } else {
    CsvWriter csv(values_path, {"value"});
    for (double v : sol.values) csv.row_numeric({v});
    csv.close();
  }
}

GridSolution load_grid_solution(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw io_error("cannot open grid solution: " + json_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw io_error("grid solution parse error in " + json_path + ": " + e.what());
  }
  GridSolution sol;
  try {
    if (j.at("format").get<std::string>() != "ctql-grid-v1")
      throw io_error("grid solution: unknown format tag");
    for (const auto& aj : j.at("axes"))
      sol.grid.axes.push_back(
          {aj.at("min").get<double>(), aj.at("max").get<double>(), aj.at("points").get<int>()});
    sol.time_slices = j.at("time_slices").get<int>();
    const json& meta = j.at("metadata");
    sol.meta.gamma = meta.at("gamma").get<double>();
    sol.meta.M = meta.at("M").get<double>();
    sol.meta.delta = meta.at("delta").get<double>();
    sol.meta.iterations = meta.at("iterations").get<long>();
    sol.meta.final_update = meta.at("final_update").get<double>();
    sol.meta.converged = meta.at("converged").get<bool>();
    sol.meta.horizon_T = meta.at("horizon_T").get<double>();

    const std::string fmt = j.at("values_format").get<std::string>();
    const std::size_t count = j.at("count").get<std::size_t>();
    std::string dir;
    const std::size_t slash = json_path.find_last_of('/');
    if (slash != std::string::npos) dir = json_path.substr(0, slash + 1);
    const std::string values_path = dir + j.at("values_file").get<std::string>();

    sol.values.resize(count);
    if (fmt == "raw") {
      std::ifstream vin(values_path, std::ios::binary);
      if (!vin) throw io_error("cannot open grid values: " + values_path);
      vin.read(reinterpret_cast<char*>(sol.values.data()),
               static_cast<std::streamsize>(count * sizeof(double)));
      if (static_cast<std::size_t>(vin.gcount()) != count * sizeof(double))
        throw io_error("grid values truncated: " + values_path);
    } else if (fmt == "csv") {
      std::ifstream vin(values_path);
      if (!vin) throw io_error("cannot open grid values: " + values_path);
      std::string line;
      if (!std::getline(vin, line)) throw io_error("grid values missing header: " + values_path);
      for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(vin, line)) throw io_error("grid values truncated: " + values_path);
        sol.values[i] = std::stod(line);
      }
    } else {
      throw io_error("grid solution: unknown values_format '" + fmt + "'");
    }
  } catch (const json::exception& e) {
    throw io_error("grid solution field error in " + json_path + ": " + e.what());
  }
  try {
    sol.validate();
  } catch (const contract_error& e) {
    throw io_error(std::string("grid solution: ") + e.what());
  }
  return sol;
}

}  // namespace ctql
