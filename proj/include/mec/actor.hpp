#pragma once

#include <deque>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "mec/config.hpp"
#include "mec/types.hpp"

namespace mec {

/// One (observation features, selected action) training pair.
struct LabeledSample {
  std::vector<double> features;
  OffloadAction label;
};

/// Scales an observation to O(1) network inputs laid out as
/// [h_1/ref .. h_N/ref, Q_1/qs .. Q_N/qs, Y_1/ys .. Y_N/ys],
/// where `reference_gain` is the mean gain of the nearest device.
std::vector<double> policy_features(const FrameInput& frame, double reference_gain,
                                    double queue_scale, double energy_scale);

/// Fully connected inputs -> hidden1 -> hidden2 -> outputs network with ReLU
/// hidden units and sigmoid outputs.
///
/// Parameters live in one flat vector ordered layer by layer, weights before
/// biases, weights row-major with one row per input unit (in x out).
class PolicyNetwork {
 public:
  PolicyNetwork(int inputs, int hidden1, int hidden2, int outputs);

  /// Network for `n_wd` devices with unit-normal weights, optionally scaled by
  /// 1/sqrt(fan_in) (biases zero in that case, unit-normal otherwise).
  static PolicyNetwork random(int n_wd, const AgentConfig& agent, std::mt19937_64& rng);

  [[nodiscard]] std::vector<double> forward(std::span<const double> features) const;

  /// Mean binary cross-entropy over the batch, summed over outputs.
  [[nodiscard]] double loss(std::span<const LabeledSample> batch) const;
  /// Same loss; `grad` receives d loss / d parameters in parameter order.
  double loss_and_gradient(std::span<const LabeledSample> batch, std::vector<double>& grad) const;

  [[nodiscard]] std::span<double> parameters() { return params_; }
  [[nodiscard]] std::span<const double> parameters() const { return params_; }
  [[nodiscard]] std::size_t parameter_count() const { return params_.size(); }
  [[nodiscard]] int inputs() const { return sizes_[0]; }
  [[nodiscard]] int outputs() const { return sizes_[3]; }
  [[nodiscard]] const std::vector<int>& layer_sizes() const { return sizes_; }

  /// Text checkpoint: layer sizes on the first line, then one parameter per line.
  void save(std::ostream& os) const;
  static PolicyNetwork load(std::istream& is);

  bool operator==(const PolicyNetwork&) const = default;

 private:
  struct Layer {
    std::size_t weights;  // offset of the weight block
    std::size_t biases;   // offset of the bias block
    int in;
    int out;

    bool operator==(const Layer&) const = default;
  };
  void affine(const Layer& layer, std::span<const double> in, std::span<double> out) const;

  std::vector<int> sizes_;
  std::vector<Layer> layers_;
  std::vector<double> params_;
};

/// Order-preserving quantisation of a relaxed action into `count` binary
/// candidates. Candidate 1 thresholds at 0.5; candidate k >= 2 thresholds at
/// the entry (k-1)-th closest to 0.5, where an entry equal to the threshold
/// maps to 1 only when the threshold is <= 0.5.
std::vector<OffloadAction> opq_quantize(std::span<const double> relaxed, int count);

/// M = 2 min(max(history) + 1, n_wd). An empty history keeps M = 2 n_wd.
int next_candidate_count(std::span<const int> best_orders, int n_wd);

/// Noisy order-preserving quantiser with an adaptive candidate count.
class NopQuantizer {
 public:
  NopQuantizer(int n_wd, int update_interval, std::mt19937_64 rng);

  [[nodiscard]] int candidate_count() const { return count_; }

  /// First half: OPQ of `relaxed`; second half: OPQ of sigmoid(relaxed + n)
  /// with n ~ N(0, I).
  std::vector<OffloadAction> candidates(std::span<const double> relaxed);

  /// Remembers m*_t; only the last `update_interval` values are kept.
  void record(int best_order);

  /// Recomputes M_t from the remembered orders and returns it.
  int update();

 private:
  int n_wd_;
  int interval_;
  int count_;
  std::deque<int> history_;
  std::mt19937_64 rng_;
};

}  // namespace mec
