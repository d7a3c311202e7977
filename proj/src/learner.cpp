#include "mec/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mec {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("memory_capacity must be >= 1");
  samples_.reserve(capacity);
}

void ReplayMemory::store(std::vector<double> features, OffloadAction label) {
  LabeledSample s{std::move(features), std::move(label)};
  if (samples_.size() < capacity_) {
    samples_.push_back(std::move(s));
  } else {
    samples_[cursor_] = std::move(s);
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<LabeledSample> ReplayMemory::ordered() const {
  if (samples_.size() < capacity_) return samples_;
  std::vector<LabeledSample> out;
  out.reserve(samples_.size());
  for (std::size_t k = 0; k < samples_.size(); ++k) out.push_back(samples_[(cursor_ + k) % capacity_]);
  return out;
}

std::vector<LabeledSample> ReplayMemory::sample(std::size_t count, std::mt19937_64& rng) const {
  count = std::min(count, samples_.size());
  std::vector<std::size_t> picks;
  picks.reserve(count);
  // Floyd's algorithm, then sort for a stable batch order
  for (std::size_t j = samples_.size() - count; j < samples_.size(); ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    const std::size_t t = pick(rng);
    if (std::find(picks.begin(), picks.end(), t) == picks.end()) {
      picks.push_back(t);
    } else {
      picks.push_back(j);
    }
  }
  std::sort(picks.begin(), picks.end());
  std::vector<LabeledSample> out;
  out.reserve(count);
  for (auto k : picks) out.push_back(samples_[k]);
  return out;
}

AdamOptimizer::AdamOptimizer(std::size_t parameters, double learning_rate, double beta1,
                             double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon),
      m_(parameters, 0.0), v_(parameters, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * grad[k];
    v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * grad[k] * grad[k];
    params[k] -= lr_ * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + eps_);
  }
}

Learner::Learner(const AgentConfig& agent, std::size_t parameters, std::mt19937_64 rng)
    : agent_(agent),
      memory_(static_cast<std::size_t>(agent.memory_capacity)),
      optimizer_(parameters, agent.learning_rate, agent.adam_beta1, agent.adam_beta2),
      rng_(std::move(rng)) {
  validate_agent_config(agent);
}

void Learner::store(std::vector<double> features, OffloadAction label) {
  memory_.store(std::move(features), std::move(label));
}

bool Learner::should_train(int t) const {
  return t % agent_.train_interval == 0 &&
         memory_.size() > static_cast<std::size_t>(agent_.memory_capacity / 2);
}

std::vector<LabeledSample> Learner::draw_batch() {
  return memory_.sample(static_cast<std::size_t>(agent_.batch_size), rng_);
}

double Learner::train_on(PolicyNetwork& net, std::span<const LabeledSample> batch) {
  const double loss = net.loss_and_gradient(batch, grad_);
  optimizer_.step(net.parameters(), grad_);
  return loss;
}

std::optional<double> Learner::maybe_train(PolicyNetwork& net, int t) {
  if (!should_train(t)) return std::nullopt;
  const auto batch = draw_batch();
  return train_on(net, batch);
}

}  // namespace mec
