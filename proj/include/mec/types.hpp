#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mec/config.hpp"

namespace mec {

/// Per-frame observation: channel gains, data backlog (bits) and virtual
/// energy backlog for every device.
struct FrameInput {
  std::vector<double> channel;
  std::vector<double> data_queue;
  std::vector<double> energy_queue;

  [[nodiscard]] std::size_t size() const { return channel.size(); }
  bool operator==(const FrameInput&) const = default;
};

/// Throws ConfigError if lengths differ from n_wd, a gain is not strictly
/// positive or a queue is negative.
void validate_frame(const FrameInput& frame, const SystemConfig& cfg);

/// Binary offloading decision; 1 = offload to the edge server.
class OffloadAction {
 public:
  OffloadAction() = default;
  explicit OffloadAction(std::size_t n) : bits_(n, 0) {}
  explicit OffloadAction(std::vector<std::uint8_t> bits);

  /// Action whose bit i equals bit (n-1-i) of `code`, i.e. device 0 is the
  /// most significant bit.
  static OffloadAction from_code(std::uint64_t code, std::size_t n);
  [[nodiscard]] std::uint64_t code() const;

  [[nodiscard]] std::size_t size() const { return bits_.size(); }
  [[nodiscard]] bool offloads(std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool offload) { bits_[i] = offload ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }
  [[nodiscard]] const std::vector<std::uint8_t>& bits() const { return bits_; }
  [[nodiscard]] std::size_t count() const;
  [[nodiscard]] std::string to_string() const;

  bool operator==(const OffloadAction&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Continuous per-frame decisions. Energies are per frame, rates in bits per
/// frame; with T = 1 these equal per-second values.
struct ResourceAllocation {
  std::vector<double> tau;
  std::vector<double> cpu;
  std::vector<double> offload_energy;
  std::vector<double> offload_rate;

  static ResourceAllocation zeros(std::size_t n);
  [[nodiscard]] std::size_t size() const { return tau.size(); }
  bool operator==(const ResourceAllocation&) const = default;
};

/// Empty when `y` is feasible for action `x` under the observation `frame`;
/// otherwise a description of the first violated constraint.
std::optional<std::string> allocation_violation(const OffloadAction& x,
                                                const ResourceAllocation& y,
                                                const FrameInput& frame,
                                                const SystemConfig& cfg);

/// Everything that happened in one frame.
struct FrameRecord {
  int frame = 0;
  FrameInput input;
  OffloadAction action;
  ResourceAllocation allocation;
  std::vector<double> processed;   // D_i, bits
  std::vector<double> rate;        // r_i, bits/s
  std::vector<double> power;       // e_i, W
  std::vector<double> arrivals;    // A_i, bits
  double objective = 0.0;          // G
  std::optional<int> candidates;   // M_t
  std::optional<int> best_index;   // m_t
  std::optional<int> best_order;   // m*_t
  std::optional<double> loss;      // training frames only
  double decide_ms = 0.0;
};

}  // namespace mec
