#pragma once

#include <span>
#include <vector>

#include "mec/config.hpp"
#include "mec/types.hpp"

namespace mec {

struct LocalOutput {
  double bits = 0.0;
  double joules = 0.0;
};

/// Bits processed and energy spent by a CPU running at `cpu_hz` for one frame.
LocalOutput local_bits_energy(double cpu_hz, const SystemConfig& cfg);

/// Bits delivered by transmitting `energy` joules over a `tau` share of the
/// frame on a channel with gain `gain`. Zero airtime carries zero bits;
/// spending energy without airtime throws ConfigError.
double offload_bits(double tau, double energy, double gain, const SystemConfig& cfg);

struct RateEnergy {
  std::vector<double> rate;   // bits/s
  std::vector<double> power;  // W
};

/// Per-device computation rate and power of executing (x, y).
RateEnergy frame_rate_energy(const OffloadAction& x, const ResourceAllocation& y,
                             std::span<const double> channel, const SystemConfig& cfg);

/// Data backlog Q (bits) and virtual energy backlog Y per device.
struct QueueState {
  std::vector<double> data;
  std::vector<double> energy;

  static QueueState zeros(std::size_t n) {
    return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  }
  bool operator==(const QueueState&) const = default;
};

/// Q' = Q - D + A and Y' = max(Y + nu e - nu gamma, 0).
/// Processing more than the backlog (beyond tolerance) throws std::logic_error.
QueueState update_queues(const QueueState& state, std::span<const double> processed,
                         std::span<const double> power, std::span<const double> arrivals,
                         const SystemConfig& cfg);

struct ObjectiveCoefficients {
  std::vector<double> a;  // Q/unit + V c, weight of one data unit
  std::vector<double> y;
};

ObjectiveCoefficients objective_coefficients(const QueueState& state, const SystemConfig& cfg);

/// Drift-plus-penalty surrogate sum_i a_i r_i / unit - sum_i Y_i e_i.
double per_frame_objective(const OffloadAction& x, const ResourceAllocation& y,
                           const QueueState& state, std::span<const double> channel,
                           const SystemConfig& cfg);

}  // namespace mec
