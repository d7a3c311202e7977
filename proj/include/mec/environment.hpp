#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mec/config.hpp"

namespace mec {

/// Independent random sub-streams derived from one experiment seed.
enum class Stream : std::uint64_t {
  kChannel = 1,
  kArrival = 2,
  kNetworkInit = 3,
  kQuantizerNoise = 4,
  kReplaySampling = 5,
};

/// Engine for sub-stream `stream` of `seed`. Distinct streams are seeded from
/// distinct seed sequences and never share state.
std::mt19937_64 make_stream(std::uint64_t seed, Stream stream);

/// Path-loss average gain A_d (c / (4 pi f_c d))^d_e with A_d = 3,
/// f_c = 915 MHz and d_e = 3.
double mean_gain(double distance);

/// Block-fading channels and exponential task arrivals for every device.
class Environment {
 public:
  Environment(const SystemConfig& cfg, std::uint64_t seed);

  /// h_i = mean_i * |sqrt(0.3) + sqrt(0.7) z|^2 with z ~ CN(0, 1): unit-mean
  /// Rician fading with 30% of the power on the line-of-sight path.
  std::vector<double> sample_channels();
  std::vector<double> sample_arrivals();

  [[nodiscard]] const std::vector<double>& mean_gains() const { return mean_gain_; }

 private:
  std::vector<double> mean_gain_;
  std::vector<double> arrival_mean_;
  std::mt19937_64 channel_rng_;
  std::mt19937_64 arrival_rng_;
};

}  // namespace mec
