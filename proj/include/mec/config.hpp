#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mec {

/// Slack allowed on every feasibility and causality invariant.
inline constexpr double kTol = 1e-9;

/// Raised when a configuration or an input violates one of its invariants.
/// The message always starts with the offending field name.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Static description of one wireless device.
struct WdProfile {
  double weight = 1.0;             // c_i
  double arrival_mean = 3e6;       // bits per frame
  double cpu_max = 3e8;            // Hz
  double tx_power_max = 0.1;       // W
  double power_threshold = 0.08;   // W, long-term average power cap
  double distance = 120.0;         // m

  bool operator==(const WdProfile&) const = default;
};

/// Every fixed scalar of the network. Units: bits, seconds, watts, joules, Hz.
struct SystemConfig {
  int n_wd = 10;
  double frame_duration = 1.0;        // s; only 1 is accepted
  double bandwidth = 2e6;             // Hz
  double rate_overhead = 1.1;         // v_u >= 1
  double noise_power = 7.96e-15;      // W; see thermal_noise_power
  double cycles_per_bit = 100.0;
  double energy_efficiency = 1e-26;   // kappa
  double lyapunov_v = 20.0;
  double energy_queue_scale = 1000.0; // nu
  /// Bits per data unit used inside the drift-plus-penalty weights.
  /// Queues and rates enter the per-frame objective as Q/unit and r/unit.
  double queue_unit = 1e6;
  std::vector<WdProfile> per_wd;

  bool operator==(const SystemConfig&) const = default;

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(n_wd); }
};

/// Hyper-parameters of the learning scheme. Not part of the network physics.
struct AgentConfig {
  int memory_capacity = 1024;
  int train_interval = 10;
  int batch_size = 32;
  double learning_rate = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  int mt_update_interval = 32;
  int hidden1 = 120;
  int hidden2 = 80;
  /// Scale the unit-normal initial weights by 1/sqrt(fan_in).
  bool scaled_init = true;
  /// Network inputs are Q_i / queue_feature_scale and Y_i / energy_feature_scale.
  double queue_feature_scale = 1e8;
  double energy_feature_scale = 1e4;

  bool operator==(const AgentConfig&) const = default;
};

/// Thermal noise over `bandwidth` Hz at -174 dBm/Hz, in watts.
double thermal_noise_power(double bandwidth);

/// Network used in the reference evaluation: N devices spaced 15 m apart from
/// 120 m, weights alternating 1.5 / 1, lambda = 3 Mbit per frame.
SystemConfig default_config(int n_wd = 10);

/// Returns `cfg` unchanged when every invariant holds; otherwise throws
/// ConfigError naming the first violated invariant.
const SystemConfig& validate_config(const SystemConfig& cfg);

void validate_agent_config(const AgentConfig& agent);

}  // namespace mec
