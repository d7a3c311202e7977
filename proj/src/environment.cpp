#include "mec/environment.hpp"

#include <cmath>
#include <numbers>

namespace mec {

std::mt19937_64 make_stream(std::uint64_t seed, Stream stream) {
  const auto id = static_cast<std::uint64_t>(stream);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id), 0x6d6563U};
  return std::mt19937_64(seq);
}

double mean_gain(double distance) {
  if (!(distance > 0.0)) throw ConfigError("distance must be positive");
  constexpr double kAntennaGain = 3.0;
  constexpr double kCarrierHz = 915e6;
  constexpr double kPathLossExponent = 3.0;
  constexpr double kLightSpeed = 3e8;
  return kAntennaGain *
         std::pow(kLightSpeed / (4.0 * std::numbers::pi * kCarrierHz * distance), kPathLossExponent);
}

Environment::Environment(const SystemConfig& cfg, std::uint64_t seed)
    : channel_rng_(make_stream(seed, Stream::kChannel)),
      arrival_rng_(make_stream(seed, Stream::kArrival)) {
  validate_config(cfg);
  mean_gain_.reserve(cfg.size());
  arrival_mean_.reserve(cfg.size());
  for (const auto& wd : cfg.per_wd) {
    mean_gain_.push_back(mean_gain(wd.distance));
    arrival_mean_.push_back(wd.arrival_mean);
  }
}

std::vector<double> Environment::sample_channels() {
  constexpr double kLosFraction = 0.3;
  const double los = std::sqrt(kLosFraction);
  const double scatter = std::sqrt((1.0 - kLosFraction) / 2.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> h(mean_gain_.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double re = los + scatter * normal(channel_rng_);
    const double im = scatter * normal(channel_rng_);
    double fading = re * re + im * im;
    // a zero draw has probability zero but would break log-rate formulas
    if (fading <= 0.0) fading = std::numeric_limits<double>::min();
    h[i] = mean_gain_[i] * fading;
  }
  return h;
}

std::vector<double> Environment::sample_arrivals() {
  std::vector<double> a(arrival_mean_.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::exponential_distribution<double> exp_dist(1.0 / arrival_mean_[i]);
    a[i] = exp_dist(arrival_rng_);
  }
  return a;
}

}  // namespace mec
