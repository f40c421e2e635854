#include "ctql/qnet.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "ctql/common.hpp"
#include "ctql/rng.hpp"

namespace ctql {

namespace {

using nlohmann::json;

// Forward pass keeping the post-activation of every layer input; acts[k] is
// the input to layer k, acts[L] is the scalar output.
std::vector<std::vector<double>> forward_trace(const QNetworkParams& p,
                                               const std::vector<double>& z) {
  const std::size_t L = p.layers.size();
  std::vector<std::vector<double>> acts(L + 1);
  acts[0] = z;
  for (std::size_t l = 0; l < L; ++l) {
    const Layer& layer = p.layers[l];
    std::vector<double> next = layer.b;
    matvec_add(layer.W, acts[l].data(), next.data());
    if (l + 1 < L)
      for (double& v : next) v = v > 0.0 ? v : 0.0;
    acts[l + 1] = std::move(next);
  }
  return acts;
}

void check_input(const QNetworkParams& p, const std::vector<double>& z, const char* where) {
  if (p.layers.empty()) throw contract_error(std::string(where) + ": empty network");
  if (static_cast<int>(z.size()) != p.input_dim())
    throw contract_error(std::string(where) + ": input width mismatch");
}

std::vector<Layer> zeros_like(const QNetworkParams& p) {
  std::vector<Layer> out;
  out.reserve(p.layers.size());
  for (const Layer& l : p.layers) {
    Layer z;
    z.W = Matrix(l.W.rows, l.W.cols, 0.0);
    z.b.assign(l.b.size(), 0.0);
    out.push_back(std::move(z));
  }
  return out;
}

json layer_to_json(const Layer& l) {
  return json{{"in", l.W.cols}, {"out", l.W.rows}, {"W", l.W.data}, {"b", l.b}};
}

Layer layer_from_json(const json& j) {
  Layer l;
  const int in = j.at("in").get<int>();
  const int out = j.at("out").get<int>();
  if (in < 1 || out < 1) throw io_error("checkpoint: bad layer shape");
  l.W = Matrix(out, in);
  std::vector<double> w = j.at("W").get<std::vector<double>>();
  if (w.size() != l.W.data.size()) throw io_error("checkpoint: weight count does not match shape");
  l.W.data = std::move(w);
  l.b = j.at("b").get<std::vector<double>>();
  if (static_cast<int>(l.b.size()) != out) throw io_error("checkpoint: bias count does not match shape");
  return l;
}

json net_to_json(const QNetworkParams& p) {
  json layers = json::array();
  for (const Layer& l : p.layers) layers.push_back(layer_to_json(l));
  return layers;
}

QNetworkParams net_from_json(const json& j) {
  QNetworkParams p;
  for (const auto& lj : j) p.layers.push_back(layer_from_json(lj));
  try {
    p.validate();
  } catch (const contract_error& e) {
    throw io_error(std::string("checkpoint: ") + e.what());
  }
  return p;
}

}  // namespace

std::size_t QNetworkParams::parameter_count() const {
  std::size_t count = 0;
  for (const Layer& l : layers) count += l.W.data.size() + l.b.size();
  return count;
}

void QNetworkParams::validate() const {
  if (layers.empty()) throw contract_error("network: no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer& layer = layers[l];
    if (layer.W.rows < 1 || layer.W.cols < 1)
      throw contract_error("network: degenerate layer shape");
    if (static_cast<int>(layer.b.size()) != layer.W.rows)
      throw contract_error("network: bias length does not match layer width");
    if (l > 0 && layers[l - 1].W.rows != layer.W.cols)
      throw contract_error("network: layer widths do not chain");
    if (!all_finite(layer.W.data) || !all_finite(layer.b))
      throw contract_error("network: non-finite parameter entry");
  }
  if (layers.back().W.rows != 1)
    throw contract_error("network: output layer must have width 1");
}

double forward(const QNetworkParams& params, const std::vector<double>& z) {
  check_input(params, z, "forward");
  const std::size_t L = params.layers.size();
  std::vector<double> act = z, next;
  for (std::size_t l = 0; l < L; ++l) {
    const Layer& layer = params.layers[l];
    next = layer.b;
    matvec_add(layer.W, act.data(), next.data());
    if (l + 1 < L)
      for (double& v : next) v = v > 0.0 ? v : 0.0;
    act.swap(next);
  }
  return act[0];
}

double forward(const QNetworkParams& params, const AugmentedState& z) {
  return forward(params, flatten(z));
}

std::vector<double> input_gradient(const QNetworkParams& params, const std::vector<double>& z) {
  check_input(params, z, "input_gradient");
  const std::size_t L = params.layers.size();

  // Pre-activations per layer; the masks come from these.
  std::vector<std::vector<double>> pre(L);
  std::vector<double> act = z;
  for (std::size_t l = 0; l < L; ++l) {
    const Layer& layer = params.layers[l];
    pre[l] = layer.b;
    matvec_add(layer.W, act.data(), pre[l].data());
    if (l + 1 < L) {
      act = pre[l];
      for (double& v : act) v = v > 0.0 ? v : 0.0;
    }
  }

  // delta holds dQ/d(pre-activation of layer l); the output layer is affine.
  std::vector<double> delta{1.0};
  for (std::size_t l = L; l-- > 0;) {
    const Layer& layer = params.layers[l];
    std::vector<double> below(static_cast<std::size_t>(layer.W.cols), 0.0);
    matvec_transpose_add(layer.W, delta.data(), below.data());
    if (l > 0)
      for (std::size_t i = 0; i < below.size(); ++i)
        if (!(pre[l - 1][i] > 0.0)) below[i] = 0.0;
    delta = std::move(below);
  }
  return delta;
}

std::vector<double> input_gradient(const QNetworkParams& params, const AugmentedState& z) {
  return input_gradient(params, flatten(z));
}

double mse_train_step(QNetworkParams& params, AdamState& adam, const std::vector<Sample>& batch) {
  if (batch.empty()) throw contract_error("mse_train_step: empty batch");
  params.validate();
  if (adam.m.size() != params.layers.size() || adam.v.size() != params.layers.size())
    throw contract_error("mse_train_step: Adam state does not match the network");

  const std::size_t L = params.layers.size();
  const double K = static_cast<double>(batch.size());
  std::vector<Layer> grad = zeros_like(params);

  double loss = 0.0;
  for (const Sample& s : batch) {
    check_input(params, s.z, "mse_train_step");
    auto acts = forward_trace(params, s.z);
    const double pred = acts[L][0];
    const double err = pred - s.y;
    loss += err * err / K;

    // Backpropagate d loss / d pre-activation, layer by layer.
    std::vector<double> delta{2.0 * err / K};
    for (std::size_t l = L; l-- > 0;) {
      Layer& g = grad[l];
      const Layer& layer = params.layers[l];
      const std::vector<double>& in = acts[l];
      for (int r = 0; r < layer.W.rows; ++r) {
        const double d = delta[static_cast<std::size_t>(r)];
        g.b[static_cast<std::size_t>(r)] += d;
        double* grow = &g.W.data[static_cast<std::size_t>(r) * layer.W.cols];
        for (int c = 0; c < layer.W.cols; ++c) grow[c] += d * in[static_cast<std::size_t>(c)];
      }
      if (l == 0) break;
      std::vector<double> below(static_cast<std::size_t>(layer.W.cols), 0.0);
      matvec_transpose_add(layer.W, delta.data(), below.data());
      // Rectifier mask: acts[l] is the post-activation of layer l-1.
      for (std::size_t i = 0; i < below.size(); ++i)
        if (!(in[i] > 0.0)) below[i] = 0.0;
      delta = std::move(below);
    }
  }

  if (!std::isfinite(loss))
    throw divergence_error("mse_train_step: non-finite loss", adam.step);
  for (const Layer& g : grad)
    if (!all_finite(g.W.data) || !all_finite(g.b))
      throw divergence_error("mse_train_step: non-finite gradient", adam.step);

  // Adam with bias correction.
  adam.step += 1;
  const AdamConfig& c = adam.cfg;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(adam.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(adam.step));
  for (std::size_t l = 0; l < L; ++l) {
    auto update = [&](std::vector<double>& theta, std::vector<double>& m,
                      std::vector<double>& v, const std::vector<double>& g) {
      for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
        v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        theta[i] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.epsilon);
      }
    };
    update(params.layers[l].W.data, adam.m[l].W.data, adam.v[l].W.data, grad[l].W.data);
    update(params.layers[l].b, adam.m[l].b, adam.v[l].b, grad[l].b);
  }
  return loss;
}

void soft_update(const QNetworkParams& params, TargetParams& target, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw contract_error("soft_update: tau must be in [0, 1]");
  if (target.net.layers.size() != params.layers.size())
    throw contract_error("soft_update: shape mismatch");
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const Layer& src = params.layers[l];
    Layer& dst = target.net.layers[l];
    if (dst.W.rows != src.W.rows || dst.W.cols != src.W.cols || dst.b.size() != src.b.size())
      throw contract_error("soft_update: shape mismatch");
    for (std::size_t i = 0; i < src.W.data.size(); ++i)
      dst.W.data[i] = tau * src.W.data[i] + (1.0 - tau) * dst.W.data[i];
    for (std::size_t i = 0; i < src.b.size(); ++i)
      dst.b[i] = tau * src.b[i] + (1.0 - tau) * dst.b[i];
  }
}

NetworkInit init_params(int n, int m, std::uint64_t seed, const std::vector<int>& hidden,
                        const AdamConfig& adam_cfg) {
  if (n < 1 || m < 1) throw contract_error("init_params: n and m must be >= 1");
  std::vector<int> widths;
  widths.push_back(n + m);
  for (int h : hidden) {
    if (h < 1) throw contract_error("init_params: hidden widths must be >= 1");
    widths.push_back(h);
  }
  widths.push_back(1);

  RngState rng = rng_stream(seed, stream_tag::net_init);
  NetworkInit out;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Layer layer;
    layer.W = Matrix(widths[l + 1], widths[l]);
    layer.b.assign(static_cast<std::size_t>(widths[l + 1]), 0.0);
    // Hidden layers at the rectifier-friendly fan-in scale, biases spread so
    // the kinks do not all pass through the origin. The output layer starts
    // two orders smaller so initial values sit near zero: early Bellman
    // targets are then dominated by the observed running cost, which keeps
    // the bootstrap anchored to the nonnegative cost scale instead of the
    // arbitrary sign pattern of the initialization.
    double bound = std::sqrt(6.0 / widths[l]);
    if (l + 2 == widths.size()) bound *= 0.01;
    for (double& w : layer.W.data) w = uniform(rng, -bound, bound);
    const double bias_bound = 1.0 / std::sqrt(static_cast<double>(widths[l]));
    for (double& b : layer.b) b = uniform(rng, -bias_bound, bias_bound);
    out.params.layers.push_back(std::move(layer));
  }
  out.params.validate();
  out.target.net = out.params;
  out.adam.m = zeros_like(out.params);
  out.adam.v = zeros_like(out.params);
  out.adam.step = 0;
  out.adam.cfg = adam_cfg;
  return out;
}

void save_checkpoint(const std::string& path, const QNetworkParams& params,
                     const TargetParams& target, const AdamState& adam,
                     const std::string& fingerprint) {
  json j;
  j["format"] = "ctql-checkpoint-v1";
  j["layers"] = net_to_json(params);
  j["target_layers"] = net_to_json(target.net);
  j["adam"] = {{"step", adam.step},
               {"learning_rate", adam.cfg.learning_rate},
               {"beta1", adam.cfg.beta1},
               {"beta2", adam.cfg.beta2},
               {"epsilon", adam.cfg.epsilon},
               {"m", net_to_json(QNetworkParams{adam.m})},
               {"v", net_to_json(QNetworkParams{adam.v})}};
  j["config_fingerprint"] = fingerprint;
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << j.dump() << '\n';
  if (!out) throw io_error("write failure on " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw io_error("checkpoint parse error in " + path + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "ctql-checkpoint-v1")
      throw io_error("checkpoint: unknown format tag");
    Checkpoint ck;
    ck.params = net_from_json(j.at("layers"));
    ck.target.net = net_from_json(j.at("target_layers"));
    const json& a = j.at("adam");
    ck.adam.step = a.at("step").get<long>();
    ck.adam.cfg.learning_rate = a.at("learning_rate").get<double>();
    ck.adam.cfg.beta1 = a.at("beta1").get<double>();
    ck.adam.cfg.beta2 = a.at("beta2").get<double>();
    ck.adam.cfg.epsilon = a.at("epsilon").get<double>();
    ck.adam.m = net_from_json(a.at("m")).layers;
    ck.adam.v = net_from_json(a.at("v")).layers;
    ck.fingerprint = j.value("config_fingerprint", "");
    if (ck.target.net.layers.size() != ck.params.layers.size() ||
        ck.adam.m.size() != ck.params.layers.size() ||
        ck.adam.v.size() != ck.params.layers.size())
      throw io_error("checkpoint: component shapes do not match");
    for (std::size_t l = 0; l < ck.params.layers.size(); ++l) {
      const Layer& ref = ck.params.layers[l];
      for (const Layer* other : {&ck.target.net.layers[l], &ck.adam.m[l], &ck.adam.v[l]})
        if (other->W.rows != ref.W.rows || other->W.cols != ref.W.cols)
          throw io_error("checkpoint: component shapes do not match");
    }
    return ck;
  } catch (const json::exception& e) {
    throw io_error("checkpoint field error in " + path + ": " + e.what());
  }
}

}  // namespace ctql
