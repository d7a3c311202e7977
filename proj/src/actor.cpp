#include "mec/actor.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

namespace mec {

namespace {

constexpr double kLogFloor = 1e-12;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

std::vector<double> policy_features(const FrameInput& frame, double reference_gain,
                                    double queue_scale, double energy_scale) {
  const std::size_t n = frame.size();
  std::vector<double> f(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = frame.channel[i] / reference_gain;
    f[n + i] = frame.data_queue[i] / queue_scale;
    f[2 * n + i] = frame.energy_queue[i] / energy_scale;
  }
  return f;
}

PolicyNetwork::PolicyNetwork(int inputs, int hidden1, int hidden2, int outputs)
    : sizes_{inputs, hidden1, hidden2, outputs} {
  if (inputs < 1 || hidden1 < 1 || hidden2 < 1 || outputs < 1) {
    throw ConfigError("layer sizes must be >= 1");
  }
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    Layer layer{offset, 0, sizes_[l], sizes_[l + 1]};
    offset += static_cast<std::size_t>(layer.in) * static_cast<std::size_t>(layer.out);
    layer.biases = offset;
    offset += static_cast<std::size_t>(layer.out);
    layers_.push_back(layer);
  }
  params_.assign(offset, 0.0);
}

PolicyNetwork PolicyNetwork::random(int n_wd, const AgentConfig& agent, std::mt19937_64& rng) {
  PolicyNetwork net(3 * n_wd, agent.hidden1, agent.hidden2, n_wd);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const auto& layer : net.layers_) {
    const double scale = agent.scaled_init ? 1.0 / std::sqrt(static_cast<double>(layer.in)) : 1.0;
    const std::size_t nw = static_cast<std::size_t>(layer.in) * static_cast<std::size_t>(layer.out);
    for (std::size_t k = 0; k < nw; ++k) net.params_[layer.weights + k] = scale * normal(rng);
    for (int k = 0; k < layer.out; ++k) {
      net.params_[layer.biases + static_cast<std::size_t>(k)] = agent.scaled_init ? 0.0 : normal(rng);
    }
  }
  return net;
}

void PolicyNetwork::affine(const Layer& layer, std::span<const double> in, std::span<double> out) const {
  const double* w = params_.data() + layer.weights;
  const double* b = params_.data() + layer.biases;
  const auto n_out = static_cast<std::size_t>(layer.out);
  std::copy(b, b + n_out, out.begin());
  for (std::size_t k = 0; k < in.size(); ++k) {
    const double v = in[k];
    if (v == 0.0) continue;
    const double* row = w + k * n_out;
    for (std::size_t o = 0; o < n_out; ++o) out[o] += row[o] * v;
  }
}

std::vector<double> PolicyNetwork::forward(std::span<const double> features) const {
  if (features.size() != static_cast<std::size_t>(inputs())) {
    throw ConfigError("feature length differs from network input size");
  }
  std::vector<double> h1(static_cast<std::size_t>(sizes_[1]));
  std::vector<double> h2(static_cast<std::size_t>(sizes_[2]));
  std::vector<double> out(static_cast<std::size_t>(sizes_[3]));
  affine(layers_[0], features, h1);
  for (auto& v : h1) v = std::max(v, 0.0);
  affine(layers_[1], h1, h2);
  for (auto& v : h2) v = std::max(v, 0.0);
  affine(layers_[2], h2, out);
  for (auto& v : out) v = sigmoid(v);
  return out;
}

double PolicyNetwork::loss(std::span<const LabeledSample> batch) const {
  if (batch.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : batch) {
    const auto p = forward(s.features);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double x = s.label.offloads(i) ? 1.0 : 0.0;
      total -= x * std::log(std::max(p[i], kLogFloor)) +
               (1.0 - x) * std::log(std::max(1.0 - p[i], kLogFloor));
    }
  }
  return total / static_cast<double>(batch.size());
}

double PolicyNetwork::loss_and_gradient(std::span<const LabeledSample> batch,
                                        std::vector<double>& grad) const {
  grad.assign(params_.size(), 0.0);
  if (batch.empty()) return 0.0;
  const auto n1 = static_cast<std::size_t>(sizes_[1]);
  const auto n2 = static_cast<std::size_t>(sizes_[2]);
  const auto n3 = static_cast<std::size_t>(sizes_[3]);
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  std::vector<double> h1(n1), h2(n2), out(n3), d1(n1), d2(n2), d3(n3);
  double total = 0.0;

  const auto accumulate = [&](const Layer& layer, std::span<const double> in, std::span<const double> delta) {
    double* gw = grad.data() + layer.weights;
    double* gb = grad.data() + layer.biases;
    const std::size_t n_out = delta.size();
    for (std::size_t k = 0; k < in.size(); ++k) {
      const double v = in[k];
      if (v == 0.0) continue;
      double* row = gw + k * n_out;
      for (std::size_t o = 0; o < n_out; ++o) row[o] += delta[o] * v;
    }
    for (std::size_t o = 0; o < n_out; ++o) gb[o] += delta[o];
  };
  const auto backprop = [&](const Layer& layer, std::span<const double> delta,
                            std::span<const double> activation, std::span<double> prev) {
    const double* w = params_.data() + layer.weights;
    const std::size_t n_out = delta.size();
    for (std::size_t k = 0; k < prev.size(); ++k) {
      if (activation[k] <= 0.0) {
        prev[k] = 0.0;
        continue;
      }
      const double* row = w + k * n_out;
      double sum = 0.0;
      for (std::size_t o = 0; o < n_out; ++o) sum += row[o] * delta[o];
      prev[k] = sum;
    }
  };

  for (const auto& s : batch) {
    affine(layers_[0], s.features, h1);
    for (auto& v : h1) v = std::max(v, 0.0);
    affine(layers_[1], h1, h2);
    for (auto& v : h2) v = std::max(v, 0.0);
    affine(layers_[2], h2, out);
    for (std::size_t i = 0; i < n3; ++i) {
      const double p = sigmoid(out[i]);
      const double x = s.label.offloads(i) ? 1.0 : 0.0;
      total -= x * std::log(std::max(p, kLogFloor)) + (1.0 - x) * std::log(std::max(1.0 - p, kLogFloor));
      d3[i] = (p - x) * inv_batch;
    }
    accumulate(layers_[2], h2, d3);
    backprop(layers_[2], d3, h2, d2);
    accumulate(layers_[1], h1, d2);
    backprop(layers_[1], d2, h1, d1);
    accumulate(layers_[0], s.features, d1);
  }
  return total * inv_batch;
}

void PolicyNetwork::save(std::ostream& os) const {
  os << sizes_[0] << ' ' << sizes_[1] << ' ' << sizes_[2] << ' ' << sizes_[3] << '\n';
  os.precision(std::numeric_limits<double>::max_digits10);
  for (double p : params_) os << p << '\n';
}

PolicyNetwork PolicyNetwork::load(std::istream& is) {
  int a = 0, b = 0, c = 0, d = 0;
  if (!(is >> a >> b >> c >> d)) throw ConfigError("checkpoint: missing layer sizes");
  PolicyNetwork net(a, b, c, d);
  for (auto& p : net.params_) {
    if (!(is >> p)) throw ConfigError("checkpoint: truncated parameter list");
  }
  return net;
}

std::vector<OffloadAction> opq_quantize(std::span<const double> relaxed, int count) {
  const std::size_t n = relaxed.size();
  if (count < 1 || static_cast<std::size_t>(count) > n) {
    throw ConfigError("opq count must be in [1, n_wd]");
  }
  std::vector<OffloadAction> out;
  out.reserve(static_cast<std::size_t>(count));
  OffloadAction first(n);
  for (std::size_t i = 0; i < n; ++i) first.set(i, relaxed[i] > 0.5);
  out.push_back(std::move(first));
  if (count == 1) return out;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(relaxed[a] - 0.5) < std::abs(relaxed[b] - 0.5);
  });
  for (int k = 1; k < count; ++k) {
    const double threshold = relaxed[order[static_cast<std::size_t>(k - 1)]];
    OffloadAction x(n);
    for (std::size_t i = 0; i < n; ++i) {
      x.set(i, relaxed[i] > threshold || (relaxed[i] == threshold && threshold <= 0.5));
    }
    out.push_back(std::move(x));
  }
  return out;
}

int next_candidate_count(std::span<const int> best_orders, int n_wd) {
  if (best_orders.empty()) return 2 * n_wd;
  const int top = *std::max_element(best_orders.begin(), best_orders.end());
  return 2 * std::min(top + 1, n_wd);
}

NopQuantizer::NopQuantizer(int n_wd, int update_interval, std::mt19937_64 rng)
    : n_wd_(n_wd), interval_(update_interval), count_(2 * n_wd), rng_(std::move(rng)) {
  if (n_wd < 1) throw ConfigError("n_wd must be >= 1");
  if (update_interval < 1) throw ConfigError("mt_update_interval must be >= 1");
}

std::vector<OffloadAction> NopQuantizer::candidates(std::span<const double> relaxed) {
  const int half = count_ / 2;
  auto out = opq_quantize(relaxed, half);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> noisy(relaxed.size());
  for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] = sigmoid(relaxed[i] + normal(rng_));
  auto more = opq_quantize(noisy, half);
  out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  return out;
}

void NopQuantizer::record(int best_order) {
  history_.push_back(best_order);
  while (history_.size() > static_cast<std::size_t>(interval_)) history_.pop_front();
}

int NopQuantizer::update() {
  const std::vector<int> recent(history_.begin(), history_.end());
  count_ = next_candidate_count(recent, n_wd_);
  return count_;
}

}  // namespace mec
