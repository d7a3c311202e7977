#include "mec/queueing.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mec {

LocalOutput local_bits_energy(double cpu_hz, const SystemConfig& cfg) {
  if (!(cpu_hz >= 0.0)) throw ConfigError("cpu frequency must be non-negative");
  const double t = cfg.frame_duration;
  return {cpu_hz * t / cfg.cycles_per_bit, cfg.energy_efficiency * cpu_hz * cpu_hz * cpu_hz * t};
}

double offload_bits(double tau, double energy, double gain, const SystemConfig& cfg) {
  if (!(tau >= 0.0)) throw ConfigError("tau must be non-negative");
  if (!(energy >= 0.0)) throw ConfigError("offload energy must be non-negative");
  if (tau == 0.0) {
    if (energy > 0.0) throw ConfigError("offload energy without airtime violates the power cap");
    return 0.0;
  }
  const double t = cfg.frame_duration;
  const double snr = energy * gain / (tau * t * cfg.noise_power);
  return cfg.bandwidth * tau * t / cfg.rate_overhead * std::log1p(snr) / std::numbers::ln2;
}

RateEnergy frame_rate_energy(const OffloadAction& x, const ResourceAllocation& y,
                             std::span<const double> channel, const SystemConfig& cfg) {
  const std::size_t n = x.size();
  RateEnergy out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  const double t = cfg.frame_duration;
  for (std::size_t i = 0; i < n; ++i) {
    if (x.offloads(i)) {
      out.rate[i] = offload_bits(y.tau[i], y.offload_energy[i], channel[i], cfg) / t;
      out.power[i] = y.offload_energy[i] / t;
    } else {
      const auto local = local_bits_energy(y.cpu[i], cfg);
      out.rate[i] = local.bits / t;
      out.power[i] = local.joules / t;
    }
  }
  return out;
}

QueueState update_queues(const QueueState& state, std::span<const double> processed,
                         std::span<const double> power, std::span<const double> arrivals,
                         const SystemConfig& cfg) {
  const std::size_t n = state.data.size();
  if (processed.size() != n || power.size() != n || arrivals.size() != n ||
      state.energy.size() != n || cfg.per_wd.size() != n) {
    throw std::invalid_argument("update_queues: length mismatch");
  }
  QueueState next = state;
  const double nu = cfg.energy_queue_scale;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = state.data[i];
    if (processed[i] > q + kTol * std::max(1.0, q)) {
      throw std::logic_error("data causality violated at device " + std::to_string(i) + ": D=" +
                             std::to_string(processed[i]) + " > Q=" + std::to_string(q));
    }
    // within-tolerance overshoot is rounding; the queue stays at zero
    next.data[i] = std::max(q - processed[i], 0.0) + arrivals[i];
    next.energy[i] = std::max(state.energy[i] + nu * power[i] - nu * cfg.per_wd[i].power_threshold, 0.0);
  }
  return next;
}

ObjectiveCoefficients objective_coefficients(const QueueState& state, const SystemConfig& cfg) {
  ObjectiveCoefficients c{std::vector<double>(state.data.size()), state.energy};
  for (std::size_t i = 0; i < c.a.size(); ++i) {
    c.a[i] = state.data[i] / cfg.queue_unit + cfg.lyapunov_v * cfg.per_wd[i].weight;
  }
  return c;
}

double per_frame_objective(const OffloadAction& x, const ResourceAllocation& y,
                           const QueueState& state, std::span<const double> channel,
                           const SystemConfig& cfg) {
  const auto re = frame_rate_energy(x, y, channel, cfg);
  const auto coeff = objective_coefficients(state, cfg);
  double g = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    g += coeff.a[i] * re.rate[i] / cfg.queue_unit - coeff.y[i] * re.power[i];
  }
  return g;
}

}  // namespace mec
