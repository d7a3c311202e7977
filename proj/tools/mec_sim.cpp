// Command-line driver: single runs (simulate) and arrival-rate sweeps (sweep).

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mec/harness.hpp"

namespace {

struct CommonFlags {
  std::string scheme = "lydroo";
  int frames = 10000;
  std::uint64_t seed = 1;
  std::string config;
  bool sequential = false;
  std::string airtime = "closed-form";
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--scheme", f.scheme, "lydroo | lycd | myopic | exhaustive")
      ->check(CLI::IsMember({"lydroo", "lycd", "myopic", "exhaustive"}));
  cmd->add_option("--frames", f.frames, "number of frames")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "experiment seed");
  cmd->add_option("--config", f.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_flag("--sequential", f.sequential,
                "synchronous training and no timing column (reproducible output)");
  cmd->add_option("--airtime-search", f.airtime, "closed-form | golden-section")
      ->check(CLI::IsMember({"closed-form", "golden-section"}));
}

mec::ExperimentConfig load(const CommonFlags& f) {
  return f.config.empty() ? mec::default_experiment() : mec::load_config(f.config);
}

mec::RunOptions run_options(const CommonFlags& f, double lambda_scale) {
  mec::RunOptions opts;
  opts.scheme = mec::parse_scheme(f.scheme);
  opts.frames = f.frames;
  opts.seed = f.seed;
  opts.lambda_scale = lambda_scale;
  opts.sequential = f.sequential;
  opts.scheme_options.concurrent_training = !f.sequential;
  opts.scheme_options.allocator.airtime_search =
      f.airtime == "golden-section" ? mec::AirtimeSearch::kGoldenSection : mec::AirtimeSearch::kClosedForm;
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov-guided online offloading simulator"};
  app.require_subcommand(1);

  CommonFlags sim_flags;
  std::string out_path;
  double lambda_scale = 1.0;
  auto* simulate = app.add_subcommand("simulate", "run one scheme and write per-frame CSV");
  add_common(simulate, sim_flags);
  simulate->add_option("--out", out_path, "CSV output path");
  simulate->add_option("--lambda-scale", lambda_scale, "multiplies every arrival mean")
      ->check(CLI::PositiveNumber);

  CommonFlags sweep_flags;
  std::vector<double> scales;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "one summary row per arrival scale");
  add_common(sweep, sweep_flags);
  sweep->add_option("--lambda-scale", scales, "arrival scales to visit")->required()->delimiter(',');
  sweep->add_option("--out", sweep_out, "summary CSV path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      const auto cfg = load(sim_flags);
      auto opts = run_options(sim_flags, lambda_scale);
      if (!out_path.empty()) opts.out = out_path;
      const auto result = mec::run_experiment(cfg, opts);
      mec::print_summary(std::cout, result.summary);
    } else if (*sweep) {
      const auto cfg = load(sweep_flags);
      std::ofstream file;
      if (!sweep_out.empty()) {
        file.open(sweep_out);
        if (!file) throw std::runtime_error("cannot write " + sweep_out);
      }
      std::ostream& os = sweep_out.empty() ? std::cout : file;
      os << "lambda_scale,avg_weighted_rate,mean_total_queue,max_avg_power,mean_decide_ms,verdict\n";
      for (double scale : scales) {
        const auto s = mec::run_experiment(cfg, run_options(sweep_flags, scale)).summary;
        os << mec::format_double(scale) << ',' << mec::format_double(s.avg_weighted_rate) << ','
           << mec::format_double(s.mean_total_queue) << ',' << mec::format_double(s.max_avg_power) << ','
           << mec::format_double(s.mean_decide_ms) << ',' << s.verdict << '\n';
      }
      if (!os) throw std::runtime_error("write failed");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
