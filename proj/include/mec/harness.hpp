#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mec/config.hpp"
#include "mec/engine.hpp"
#include "mec/types.hpp"

namespace mec {

struct ExperimentConfig {
  SystemConfig system;
  AgentConfig agent;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Reference network (see default_config) with default agent settings.
ExperimentConfig default_experiment(int n_wd = 10);

/// Parses flat `key = value` text. `#` starts a comment. Per-device keys take
/// comma-separated lists with n_wd entries (or one entry applied to all).
/// Keys not given keep their default_experiment(n_wd) value; noise_power
/// defaults to thermal noise over the configured bandwidth. Unknown or
/// repeated keys are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Writes every key; parse_config(format_config(c)) == c for finite values.
std::string format_config(const ExperimentConfig& cfg);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// frame, then per device h,Q,Y,x,tau,f,eO,rO,D,e,A (suffixed _i, 1-based),
/// then G,M_t,m_star,loss,decide_ms.
std::string csv_header(int n_wd);
/// Fields that do not apply to the scheme or frame are left empty.
std::string csv_row(const FrameRecord& rec, bool include_timing);

struct RunSummary {
  std::string scheme;
  int frames = 0;
  std::uint64_t seed = 0;
  double lambda_scale = 1.0;
  double avg_weighted_rate = 0.0;        // sum_i c_i r_i averaged over frames, bits/s
  std::vector<double> avg_power;         // per device, W
  double max_avg_power = 0.0;
  double mean_total_queue = 0.0;         // sum_i Q_i(t) averaged over frames, bits
  double mean_decide_ms = 0.0;
  std::string verdict;                   // stable / diverging / n/a
};

/// Summary statistics of a run. `weights` are the c_i.
RunSummary summarize(std::span<const FrameRecord> records, std::span<const double> weights,
                     double mean_arrival_per_frame);

/// Recomputes the summary statistics from CSV text produced by csv_header/csv_row.
RunSummary summarize_csv(std::string_view csv, std::span<const double> weights,
                         double mean_arrival_per_frame);

void print_summary(std::ostream& os, const RunSummary& s);

struct RunOptions {
  SchemeKind scheme = SchemeKind::kLyDroo;
  int frames = 10000;
  std::uint64_t seed = 1;
  /// Multiplies every arrival mean.
  double lambda_scale = 1.0;
  /// Synchronous training and no wall-clock column, so equal inputs give
  /// byte-identical CSV output.
  bool sequential = true;
  std::optional<std::filesystem::path> out;
  SchemeOptions scheme_options;
};

struct RunResult {
  std::vector<FrameRecord> records;
  RunSummary summary;
  SystemConfig system;  // after lambda scaling
};

/// Runs one scheme for `frames` frames from empty queues, writing one CSV row
/// per frame when `out` is set. Throws std::runtime_error if the output file
/// cannot be written.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

/// Entry t is the mean of entries max(0, t-window+1)..t.
std::vector<double> moving_average(std::span<const double> series, int window = 200);

enum class Stability { kStable, kDiverging };
std::string_view stability_name(Stability s);

/// Least-squares slope of the final `tail_fraction` of the 200-frame moving
/// average of `total_queue`, compared with `slope_factor` times the mean
/// total arrival per frame. Needs at least 400 entries.
Stability stability_verdict(std::span<const double> total_queue, double mean_arrival_per_frame,
                            double tail_fraction = 0.25, double slope_factor = 0.01);

/// Total data backlog sum_i Q_i(t) at the start of each frame.
std::vector<double> total_queue_series(std::span<const FrameRecord> records);

}  // namespace mec
