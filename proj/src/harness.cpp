#include "mec/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mec {

namespace {

constexpr std::string_view kPerDeviceKeys[] = {"weight", "arrival_mean", "cpu_max",
                                               "tx_power_max", "power_threshold", "distance"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view text, const std::string& key) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(key + ": not a number: '" + std::string(text) + "'");
  }
  return value;
}

int parse_int(std::string_view text, const std::string& key) {
  text = trim(text);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(key + ": not an integer: '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view text, const std::string& key) {
  text = trim(text);
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(key + ": expected true or false");
}

std::vector<double> parse_list(std::string_view text, const std::string& key, std::size_t n) {
  std::vector<double> values;
  for (auto part : split(text, ',')) values.push_back(parse_double(part, key));
  if (values.size() == 1) values.assign(n, values.front());
  if (values.size() != n) {
    throw ConfigError(key + ": expected " + std::to_string(n) + " comma-separated values, got " +
                      std::to_string(values.size()));
  }
  return values;
}

double& device_field(WdProfile& wd, std::string_view key) {
  if (key == "weight") return wd.weight;
  if (key == "arrival_mean") return wd.arrival_mean;
  if (key == "cpu_max") return wd.cpu_max;
  if (key == "tx_power_max") return wd.tx_power_max;
  if (key == "power_threshold") return wd.power_threshold;
  return wd.distance;
}

// offsets inside a CSV row
constexpr std::size_t kPerDevice = 11;
enum DeviceCol : std::size_t { kH, kQ, kY, kX, kTau, kF, kEO, kRO, kD, kE, kA };

}  // namespace

ExperimentConfig default_experiment(int n_wd) {
  return {default_config(n_wd), AgentConfig{}};
}

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, std::string, std::less<>> entries;
  int line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (!entries.emplace(key, value).second) {
      throw ConfigError(key + ": repeated on line " + std::to_string(line_no));
    }
  }

  int n = 10;
  if (auto it = entries.find("n_wd"); it != entries.end()) n = parse_int(it->second, "n_wd");
  if (n < 1) throw ConfigError("n_wd must be >= 1");
  auto cfg = default_experiment(n);
  auto& sys = cfg.system;
  auto& agent = cfg.agent;
  bool noise_given = false;

  for (const auto& [key, value] : entries) {
    if (key == "n_wd") continue;
    if (key == "frame_duration") sys.frame_duration = parse_double(value, key);
    else if (key == "bandwidth") sys.bandwidth = parse_double(value, key);
    else if (key == "rate_overhead") sys.rate_overhead = parse_double(value, key);
    else if (key == "noise_power") { sys.noise_power = parse_double(value, key); noise_given = true; }
    else if (key == "cycles_per_bit") sys.cycles_per_bit = parse_double(value, key);
    else if (key == "energy_efficiency") sys.energy_efficiency = parse_double(value, key);
    else if (key == "lyapunov_v") sys.lyapunov_v = parse_double(value, key);
    else if (key == "energy_queue_scale") sys.energy_queue_scale = parse_double(value, key);
    else if (key == "queue_unit") sys.queue_unit = parse_double(value, key);
    else if (key == "memory_capacity") agent.memory_capacity = parse_int(value, key);
    else if (key == "train_interval") agent.train_interval = parse_int(value, key);
    else if (key == "batch_size") agent.batch_size = parse_int(value, key);
    else if (key == "learning_rate") agent.learning_rate = parse_double(value, key);
    else if (key == "adam_beta1") agent.adam_beta1 = parse_double(value, key);
    else if (key == "adam_beta2") agent.adam_beta2 = parse_double(value, key);
    else if (key == "mt_update_interval") agent.mt_update_interval = parse_int(value, key);
    else if (key == "hidden1") agent.hidden1 = parse_int(value, key);
    else if (key == "hidden2") agent.hidden2 = parse_int(value, key);
    else if (key == "scaled_init") agent.scaled_init = parse_bool(value, key);
    else if (key == "queue_feature_scale") agent.queue_feature_scale = parse_double(value, key);
    else if (key == "energy_feature_scale") agent.energy_feature_scale = parse_double(value, key);
    else if (std::find(std::begin(kPerDeviceKeys), std::end(kPerDeviceKeys), key) != std::end(kPerDeviceKeys)) {
      const auto values = parse_list(value, key, sys.size());
      for (std::size_t i = 0; i < values.size(); ++i) device_field(sys.per_wd[i], key) = values[i];
    } else {
      throw ConfigError(key + ": unknown key");
    }
  }
  if (!noise_given) sys.noise_power = thermal_noise_power(sys.bandwidth);
  validate_config(sys);
  validate_agent_config(agent);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_config(const ExperimentConfig& cfg) {
  const auto& s = cfg.system;
  const auto& a = cfg.agent;
  std::ostringstream os;
  os << "n_wd = " << s.n_wd << '\n'
     << "frame_duration = " << format_double(s.frame_duration) << '\n'
     << "bandwidth = " << format_double(s.bandwidth) << '\n'
     << "rate_overhead = " << format_double(s.rate_overhead) << '\n'
     << "noise_power = " << format_double(s.noise_power) << '\n'
     << "cycles_per_bit = " << format_double(s.cycles_per_bit) << '\n'
     << "energy_efficiency = " << format_double(s.energy_efficiency) << '\n'
     << "lyapunov_v = " << format_double(s.lyapunov_v) << '\n'
     << "energy_queue_scale = " << format_double(s.energy_queue_scale) << '\n'
     << "queue_unit = " << format_double(s.queue_unit) << '\n';
  for (auto key : kPerDeviceKeys) {
    os << key << " = ";
    for (std::size_t i = 0; i < s.per_wd.size(); ++i) {
      if (i) os << ',';
      auto wd = s.per_wd[i];
      os << format_double(device_field(wd, key));
    }
    os << '\n';
  }
  os << "memory_capacity = " << a.memory_capacity << '\n'
     << "train_interval = " << a.train_interval << '\n'
     << "batch_size = " << a.batch_size << '\n'
     << "learning_rate = " << format_double(a.learning_rate) << '\n'
     << "adam_beta1 = " << format_double(a.adam_beta1) << '\n'
     << "adam_beta2 = " << format_double(a.adam_beta2) << '\n'
     << "mt_update_interval = " << a.mt_update_interval << '\n'
     << "hidden1 = " << a.hidden1 << '\n'
     << "hidden2 = " << a.hidden2 << '\n'
     << "scaled_init = " << (a.scaled_init ? "true" : "false") << '\n'
     << "queue_feature_scale = " << format_double(a.queue_feature_scale) << '\n'
     << "energy_feature_scale = " << format_double(a.energy_feature_scale) << '\n';
  return os.str();
}

std::string csv_header(int n_wd) {
  static constexpr std::string_view kNames[] = {"h", "Q", "Y", "x", "tau", "f", "eO", "rO", "D", "e", "A"};
  std::string out = "frame";
  for (int i = 1; i <= n_wd; ++i) {
    for (auto name : kNames) {
      out += ',';
      out += name;
      out += '_';
      out += std::to_string(i);
    }
  }
  out += ",G,M_t,m_star,loss,decide_ms";
  return out;
}

std::string csv_row(const FrameRecord& r, bool include_timing) {
  std::string out = std::to_string(r.frame);
  const auto put = [&out](double v) {
    out += ',';
    out += format_double(v);
  };
  for (std::size_t i = 0; i < r.action.size(); ++i) {
    put(r.input.channel[i]);
    put(r.input.data_queue[i]);
    put(r.input.energy_queue[i]);
    out += r.action.offloads(i) ? ",1" : ",0";
    put(r.allocation.tau[i]);
    put(r.allocation.cpu[i]);
    put(r.allocation.offload_energy[i]);
    put(r.allocation.offload_rate[i]);
    put(r.processed[i]);
    put(r.power[i]);
    put(r.arrivals[i]);
  }
  put(r.objective);
  out += ',';
  if (r.candidates) out += std::to_string(*r.candidates);
  out += ',';
  if (r.best_order) out += std::to_string(*r.best_order);
  out += ',';
  if (r.loss) out += format_double(*r.loss);
  out += ',';
  if (include_timing) out += format_double(r.decide_ms);
  return out;
}

RunSummary summarize(std::span<const FrameRecord> records, std::span<const double> weights,
                     double mean_arrival_per_frame) {
  RunSummary s;
  s.frames = static_cast<int>(records.size());
  s.avg_power.assign(weights.size(), 0.0);
  s.verdict = "n/a";
  if (records.empty()) return s;
  for (const auto& r : records) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
      s.avg_weighted_rate += weights[i] * r.rate[i];
      s.avg_power[i] += r.power[i];
      s.mean_total_queue += r.input.data_queue[i];
    }
    s.mean_decide_ms += r.decide_ms;
  }
  const double k = static_cast<double>(records.size());
  s.avg_weighted_rate /= k;
  s.mean_total_queue /= k;
  s.mean_decide_ms /= k;
  for (auto& p : s.avg_power) p /= k;
  s.max_avg_power = *std::max_element(s.avg_power.begin(), s.avg_power.end());
  if (records.size() >= 400) {
    s.verdict = std::string(stability_name(stability_verdict(total_queue_series(records), mean_arrival_per_frame)));
  }
  return s;
}

RunSummary summarize_csv(std::string_view csv, std::span<const double> weights,
                         double mean_arrival_per_frame) {
  const std::size_t n = weights.size();
  std::vector<FrameRecord> records;
  bool header = true;
  for (auto line : split(csv, '\n')) {
    if (line.empty()) continue;
    if (header) {
      if (line != csv_header(static_cast<int>(n))) throw ConfigError("csv: unexpected header");
      header = false;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 1 + kPerDevice * n + 5) throw ConfigError("csv: wrong field count");
    FrameRecord r;
    r.frame = parse_int(fields[0], "frame");
    r.input.data_queue.resize(n);
    r.rate.resize(n);
    r.power.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto at = [&](std::size_t col) { return fields[1 + kPerDevice * i + col]; };
      r.input.data_queue[i] = parse_double(at(kQ), "Q");
      r.rate[i] = parse_double(at(kD), "D");  // T = 1
      r.power[i] = parse_double(at(kE), "e");
    }
    const auto& timing = fields.back();
    r.decide_ms = timing.empty() ? 0.0 : parse_double(timing, "decide_ms");
    records.push_back(std::move(r));
  }
  return summarize(records, weights, mean_arrival_per_frame);
}

void print_summary(std::ostream& os, const RunSummary& s) {
  os << "{\n"
     << "  scheme: " << s.scheme << '\n'
     << "  frames: " << s.frames << '\n'
     << "  seed: " << s.seed << '\n'
     << "  lambda_scale: " << format_double(s.lambda_scale) << '\n'
     << "  avg_weighted_rate_bps: " << format_double(s.avg_weighted_rate) << '\n'
     << "  mean_total_queue_bits: " << format_double(s.mean_total_queue) << '\n'
     << "  max_avg_power_w: " << format_double(s.max_avg_power) << '\n'
     << "  avg_power_w: [";
  for (std::size_t i = 0; i < s.avg_power.size(); ++i) os << (i ? ", " : "") << format_double(s.avg_power[i]);
  os << "]\n"
     << "  mean_decide_ms: " << format_double(s.mean_decide_ms) << '\n'
     << "  queue_verdict: " << s.verdict << '\n'
     << "}\n";
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (opts.frames < 1) throw ConfigError("frames must be >= 1");
  if (!(opts.lambda_scale > 0.0)) throw ConfigError("lambda_scale must be positive");
  RunResult result;
  result.system = cfg.system;
  for (auto& wd : result.system.per_wd) wd.arrival_mean *= opts.lambda_scale;
  validate_config(result.system);
  const auto& sys = result.system;

  std::ofstream out;
  if (opts.out) {
    out.open(*opts.out, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + opts.out->string());
    out << csv_header(sys.n_wd) << '\n';
  }

  auto scheme_opts = opts.scheme_options;
  if (opts.sequential) scheme_opts.concurrent_training = false;
  auto scheme = make_scheme(opts.scheme, sys, cfg.agent, opts.seed, scheme_opts);
  Environment env(sys, opts.seed);
  auto queues = QueueState::zeros(sys.size());
  result.records.reserve(static_cast<std::size_t>(opts.frames));
  for (int t = 1; t <= opts.frames; ++t) {
    auto [rec, next] = step(*scheme, env, queues, t, sys);
    queues = std::move(next);
    if (out) out << csv_row(rec, !opts.sequential) << '\n';
    result.records.push_back(std::move(rec));
  }
  if (out) {
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + opts.out->string());
  }

  std::vector<double> weights;
  double arrival = 0.0;
  for (const auto& wd : sys.per_wd) {
    weights.push_back(wd.weight);
    arrival += wd.arrival_mean;
  }
  result.summary = summarize(result.records, weights, arrival);
  result.summary.scheme = std::string(scheme_name(opts.scheme));
  result.summary.seed = opts.seed;
  result.summary.lambda_scale = opts.lambda_scale;
  return result;
}

std::vector<double> moving_average(std::span<const double> series, int window) {
  if (window < 1) throw ConfigError("window must be >= 1");
  std::vector<double> out(series.size());
  double sum = 0.0;
  const auto w = static_cast<std::size_t>(window);
  for (std::size_t t = 0; t < series.size(); ++t) {
    sum += series[t];
    if (t >= w) sum -= series[t - w];
    out[t] = sum / static_cast<double>(std::min(t + 1, w));
  }
  return out;
}

std::string_view stability_name(Stability s) {
  return s == Stability::kStable ? "stable" : "diverging";
}

Stability stability_verdict(std::span<const double> total_queue, double mean_arrival_per_frame,
                            double tail_fraction, double slope_factor) {
  if (total_queue.size() < 400) throw ConfigError("stability_verdict needs at least 400 frames");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw ConfigError("tail_fraction must be in (0, 1]");
  const auto smooth = moving_average(total_queue, 200);
  const auto tail = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::llround(tail_fraction * static_cast<double>(smooth.size()))));
  const std::size_t start = smooth.size() - tail;
  double mean_t = 0.0, mean_q = 0.0;
  for (std::size_t k = start; k < smooth.size(); ++k) {
    mean_t += static_cast<double>(k);
    mean_q += smooth[k];
  }
  mean_t /= static_cast<double>(tail);
  mean_q /= static_cast<double>(tail);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = start; k < smooth.size(); ++k) {
    const double dt = static_cast<double>(k) - mean_t;
    sxy += dt * (smooth[k] - mean_q);
    sxx += dt * dt;
  }
  const double slope = sxy / sxx;
  return slope > slope_factor * mean_arrival_per_frame ? Stability::kDiverging : Stability::kStable;
}

std::vector<double> total_queue_series(std::span<const FrameRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back(std::accumulate(r.input.data_queue.begin(), r.input.data_queue.end(), 0.0));
  }
  return out;
}

}  // namespace mec
