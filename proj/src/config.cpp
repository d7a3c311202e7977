#include "mec/config.hpp"

#include <cmath>

namespace mec {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void require_positive(double value, const std::string& field) {
  require(std::isfinite(value) && value > 0.0, field + " must be positive and finite");
}

}  // namespace

double thermal_noise_power(double bandwidth) {
  constexpr double kNoiseDensityDbmPerHz = -174.0;
  return bandwidth * std::pow(10.0, kNoiseDensityDbmPerHz / 10.0) * 1e-3;
}

SystemConfig default_config(int n_wd) {
  SystemConfig cfg;
  cfg.n_wd = n_wd;
  cfg.noise_power = thermal_noise_power(cfg.bandwidth);
  cfg.per_wd.resize(static_cast<std::size_t>(std::max(n_wd, 0)));
  for (int i = 0; i < n_wd; ++i) {
    auto& wd = cfg.per_wd[static_cast<std::size_t>(i)];
    // 1-based odd devices carry weight 1.5
    wd.weight = (i % 2 == 0) ? 1.5 : 1.0;
    wd.distance = n_wd > 1 ? 120.0 + 135.0 * i / (n_wd - 1) : 120.0;
  }
  return cfg;
}

const SystemConfig& validate_config(const SystemConfig& cfg) {
  require(cfg.n_wd >= 1, "n_wd must be >= 1");
  require_positive(cfg.frame_duration, "frame_duration");
  require(cfg.frame_duration == 1.0, "frame_duration must be 1 (other frame lengths are unsupported)");
  require_positive(cfg.bandwidth, "bandwidth");
  require(std::isfinite(cfg.rate_overhead) && cfg.rate_overhead >= 1.0, "rate_overhead < 1");
  require_positive(cfg.noise_power, "noise_power");
  require_positive(cfg.cycles_per_bit, "cycles_per_bit");
  require_positive(cfg.energy_efficiency, "energy_efficiency");
  require_positive(cfg.lyapunov_v, "lyapunov_v");
  require_positive(cfg.energy_queue_scale, "energy_queue_scale");
  require_positive(cfg.queue_unit, "queue_unit");
  require(cfg.per_wd.size() == cfg.size(), "per_wd must have exactly n_wd entries");
  for (std::size_t i = 0; i < cfg.per_wd.size(); ++i) {
    const auto& wd = cfg.per_wd[i];
    const std::string idx = "[" + std::to_string(i) + "]";
    require_positive(wd.weight, "weight" + idx);
    require_positive(wd.arrival_mean, "arrival_mean" + idx);
    require_positive(wd.cpu_max, "cpu_max" + idx);
    require_positive(wd.tx_power_max, "tx_power_max" + idx);
    require_positive(wd.power_threshold, "power_threshold" + idx);
    require_positive(wd.distance, "distance" + idx);
  }
  return cfg;
}

void validate_agent_config(const AgentConfig& agent) {
  require(agent.memory_capacity >= 2, "memory_capacity must be >= 2");
  require(agent.train_interval >= 1, "train_interval must be >= 1");
  require(agent.batch_size >= 1, "batch_size must be >= 1");
  require(agent.batch_size <= agent.memory_capacity / 2 + 1,
          "batch_size must not exceed the training threshold memory_capacity/2");
  require_positive(agent.learning_rate, "learning_rate");
  require(agent.adam_beta1 >= 0.0 && agent.adam_beta1 < 1.0, "adam_beta1 must be in [0,1)");
  require(agent.adam_beta2 >= 0.0 && agent.adam_beta2 < 1.0, "adam_beta2 must be in [0,1)");
  require(agent.mt_update_interval >= 1, "mt_update_interval must be >= 1");
  require(agent.hidden1 >= 1 && agent.hidden2 >= 1, "hidden layer sizes must be >= 1");
  require_positive(agent.queue_feature_scale, "queue_feature_scale");
  require_positive(agent.energy_feature_scale, "energy_feature_scale");
}

}  // namespace mec
