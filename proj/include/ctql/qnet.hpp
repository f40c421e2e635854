#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctql/env.hpp"
#include "ctql/matrix.hpp"

namespace ctql {

struct Layer {
  Matrix W;               // out x in, row-major
  std::vector<double> b;  // out
};

/// Fully connected scalar-output network. Hidden layers use the rectifier
/// max(0, .) with derivative taken as 0 at exactly 0; the output layer is
/// affine. All math is 64-bit.
struct QNetworkParams {
  std::vector<Layer> layers;

  int input_dim() const { return layers.empty() ? 0 : layers.front().W.cols; }
  int output_dim() const { return layers.empty() ? 0 : layers.back().W.rows; }
  std::size_t parameter_count() const;
  void validate() const;  // chained shapes, scalar output, finite entries
};

/// Slowly tracking copy of the live parameters used inside Bellman targets.
struct TargetParams {
  QNetworkParams net;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment accumulators shaped like the parameters, plus the step
/// counter for bias correction.
struct AdamState {
  std::vector<Layer> m;
  std::vector<Layer> v;
  long step = 0;
  AdamConfig cfg;
};

struct Sample {
  std::vector<double> z;  // flattened (x, u)
  double y = 0.0;
};

double forward(const QNetworkParams& params, const std::vector<double>& z);
double forward(const QNetworkParams& params, const AugmentedState& z);

/// dQ/dz by reverse-mode differentiation; length input_dim.
std::vector<double> input_gradient(const QNetworkParams& params, const std::vector<double>& z);
std::vector<double> input_gradient(const QNetworkParams& params, const AugmentedState& z);

/// One Adam step on the mean-squared-error loss (1/K) sum (Q(z_i) - y_i)^2.
/// Returns the pre-update loss. Throws divergence_error if the loss or any
/// gradient entry is non-finite. Single-writer: exactly one thread may own
/// the live parameters.
double mse_train_step(QNetworkParams& params, AdamState& adam, const std::vector<Sample>& batch);

/// target <- tau * params + (1 - tau) * target, entrywise.
void soft_update(const QNetworkParams& params, TargetParams& target, double tau);

struct NetworkInit {
  QNetworkParams params;
  TargetParams target;  // exact copy of params
  AdamState adam;       // zeroed moments
};

/// Weights uniform on +-sqrt(6 / fan_in) per layer, biases zero, drawn from a
/// splitmix64 stream keyed by `seed` (layer by layer, weights row-major).
NetworkInit init_params(int n, int m, std::uint64_t seed,
                        const std::vector<int>& hidden = {128, 128},
                        const AdamConfig& adam_cfg = {});

struct Checkpoint {
  QNetworkParams params;
  TargetParams target;
  AdamState adam;
  std::string fingerprint;
};

/// JSON checkpoint: layer shapes, row-major weights, biases, Adam state and
/// the originating config fingerprint. Load rejects inconsistent shapes.
void save_checkpoint(const std::string& path, const QNetworkParams& params,
                     const TargetParams& target, const AdamState& adam,
                     const std::string& fingerprint);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace ctql
