#pragma once

#include <optional>
#include <random>
#include <vector>

#include "mec/actor.hpp"

namespace mec {

/// Fixed-capacity memory of the most recent (features, action) pairs.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  /// Appends a pair, overwriting the oldest one when full.
  void store(std::vector<double> features, OffloadAction label);

  [[nodiscard]] std::size_t size() const { return samples_.size(); }
  [[nodiscard]] std::size_t capacity() const { return capacity_; }

  /// Stored pairs from oldest to newest.
  [[nodiscard]] std::vector<LabeledSample> ordered() const;

  /// `count` distinct pairs drawn uniformly without replacement.
  [[nodiscard]] std::vector<LabeledSample> sample(std::size_t count, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<LabeledSample> samples_;
};

/// Adaptive-moment optimiser over a flat parameter vector.
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t parameters, double learning_rate, double beta1, double beta2,
                double epsilon = 1e-8);

  void step(std::span<double> params, std::span<const double> grad);

 private:
  double lr_, beta1_, beta2_, eps_;
  long steps_ = 0;
  std::vector<double> m_, v_;
};

/// Replay memory plus the periodic cross-entropy update of the policy.
class Learner {
 public:
  Learner(const AgentConfig& agent, std::size_t parameters, std::mt19937_64 rng);

  void store(std::vector<double> features, OffloadAction label);

  /// True when frame `t` is a training frame: t is a multiple of the training
  /// interval and the memory holds more than capacity/2 pairs.
  [[nodiscard]] bool should_train(int t) const;

  /// One optimiser step on a uniform batch when should_train(t); returns the
  /// loss measured before the step.
  std::optional<double> maybe_train(PolicyNetwork& net, int t);

  /// One optimiser step on an explicit batch; returns the pre-step loss.
  double train_on(PolicyNetwork& net, std::span<const LabeledSample> batch);

  /// Draws the batch a training step at this point would use.
  std::vector<LabeledSample> draw_batch();

  [[nodiscard]] const ReplayMemory& memory() const { return memory_; }

 private:
  AgentConfig agent_;
  ReplayMemory memory_;
  AdamOptimizer optimizer_;
  std::mt19937_64 rng_;
  std::vector<double> grad_;
};

}  // namespace mec
