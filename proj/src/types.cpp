#include "mec/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mec {

namespace {

bool within(double value, double bound) {
  return value <= bound + kTol * std::max(1.0, std::abs(bound));
}

}  // namespace

void validate_frame(const FrameInput& frame, const SystemConfig& cfg) {
  const std::size_t n = cfg.size();
  if (frame.channel.size() != n) throw ConfigError("channel length differs from n_wd");
  if (frame.data_queue.size() != n) throw ConfigError("data_queue length differs from n_wd");
  if (frame.energy_queue.size() != n) throw ConfigError("energy_queue length differs from n_wd");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(frame.channel[i] > 0.0) || !std::isfinite(frame.channel[i]))
      throw ConfigError("channel[" + std::to_string(i) + "] must be positive");
    if (!(frame.data_queue[i] >= 0.0) || !std::isfinite(frame.data_queue[i]))
      throw ConfigError("data_queue[" + std::to_string(i) + "] must be non-negative");
    if (!(frame.energy_queue[i] >= 0.0) || !std::isfinite(frame.energy_queue[i]))
      throw ConfigError("energy_queue[" + std::to_string(i) + "] must be non-negative");
  }
}

OffloadAction::OffloadAction(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) {
    if (b > 1) throw ConfigError("offload action entries must be 0 or 1");
  }
}

OffloadAction OffloadAction::from_code(std::uint64_t code, std::size_t n) {
  OffloadAction x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x.bits_[i] = static_cast<std::uint8_t>((code >> (n - 1 - i)) & 1U);
  }
  return x;
}

std::uint64_t OffloadAction::code() const {
  std::uint64_t c = 0;
  for (auto b : bits_) c = (c << 1) | b;
  return c;
}

std::size_t OffloadAction::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::string OffloadAction::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

ResourceAllocation ResourceAllocation::zeros(std::size_t n) {
  return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
          std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

std::optional<std::string> allocation_violation(const OffloadAction& x,
                                                const ResourceAllocation& y,
                                                const FrameInput& frame,
                                                const SystemConfig& cfg) {
  const std::size_t n = cfg.size();
  if (x.size() != n || y.tau.size() != n || y.cpu.size() != n ||
      y.offload_energy.size() != n || y.offload_rate.size() != n) {
    return "allocation length differs from n_wd";
  }
  const double tau_sum = std::accumulate(y.tau.begin(), y.tau.end(), 0.0);
  if (tau_sum > 1.0 + kTol) return "sum of tau exceeds 1: " + std::to_string(tau_sum);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& wd = cfg.per_wd[i];
    const std::string idx = "[" + std::to_string(i) + "]";
    if (y.tau[i] < 0.0 || y.cpu[i] < 0.0 || y.offload_energy[i] < 0.0 || y.offload_rate[i] < 0.0)
      return "negative allocation entry" + idx;
    if (x.offloads(i)) {
      if (y.cpu[i] != 0.0) return "offloading device runs its CPU" + idx;
    } else if (y.tau[i] != 0.0 || y.offload_energy[i] != 0.0 || y.offload_rate[i] != 0.0) {
      return "local device has offloading resources" + idx;
    }
    if (!within(y.cpu[i], wd.cpu_max)) return "cpu exceeds cpu_max" + idx;
    if (!within(y.offload_energy[i], wd.tx_power_max * y.tau[i]))
      return "offload energy exceeds tx_power_max * tau" + idx;
    if (!within(y.cpu[i] * cfg.frame_duration / cfg.cycles_per_bit, frame.data_queue[i]))
      return "local bits exceed data queue" + idx;
    if (!within(y.offload_rate[i], frame.data_queue[i])) return "offload rate exceeds data queue" + idx;
    if (y.tau[i] > 0.0) {
      const double capacity = cfg.bandwidth * y.tau[i] / cfg.rate_overhead *
                              std::log2(1.0 + y.offload_energy[i] * frame.channel[i] /
                                                  (y.tau[i] * cfg.noise_power));
      if (!within(y.offload_rate[i], capacity)) return "offload rate exceeds link capacity" + idx;
    } else if (y.offload_rate[i] > kTol) {
      return "offload rate without airtime" + idx;
    }
  }
  return std::nullopt;
}

}  // namespace mec
