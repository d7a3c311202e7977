#include "mec/engine.hpp"

#include <chrono>
#include <stdexcept>
#include <unordered_map>

namespace mec {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

std::string_view scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kLyDroo: return "lydroo";
    case SchemeKind::kLyCd: return "lycd";
    case SchemeKind::kMyopic: return "myopic";
    case SchemeKind::kExhaustive: return "exhaustive";
  }
  return "unknown";
}

SchemeKind parse_scheme(std::string_view name) {
  for (auto kind : {SchemeKind::kLyDroo, SchemeKind::kLyCd, SchemeKind::kMyopic, SchemeKind::kExhaustive}) {
    if (scheme_name(kind) == name) return kind;
  }
  throw ConfigError("scheme must be one of lydroo, lycd, myopic, exhaustive; got '" +
                    std::string(name) + "'");
}

// --- search-based schemes ---------------------------------------------------

SearchScheme::SearchScheme(SchemeKind kind, const SystemConfig& cfg, const SchemeOptions& opts)
    : kind_(kind), cfg_(validate_config(cfg)), opts_(opts) {
  if (kind != SchemeKind::kLyCd && kind != SchemeKind::kExhaustive) {
    throw ConfigError("SearchScheme handles lycd and exhaustive only");
  }
  validate_allocator_options(opts.allocator);
}

Decision SearchScheme::decide(const FrameInput& frame, int /*t*/) {
  const auto start = Clock::now();
  auto result = kind_ == SchemeKind::kLyCd ? coordinate_descent_best(frame, cfg_, opts_.allocator)
                                           : exhaustive_best(frame, cfg_, opts_.allocator);
  Decision d;
  d.decide_ms = elapsed_ms(start);
  d.action = std::move(result.action);
  d.allocation = std::move(result.allocation);
  return d;
}

// --- myopic -----------------------------------------------------------------

MyopicScheme::MyopicScheme(const SystemConfig& cfg, const SchemeOptions& opts)
    : cfg_(validate_config(cfg)), opts_(opts), spent_(cfg.size(), 0.0) {
  validate_allocator_options(opts.allocator);
}

std::vector<double> MyopicScheme::budgets(int t) const {
  std::vector<double> b(cfg_.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    b[i] = std::max(t * cfg_.per_wd[i].power_threshold * cfg_.frame_duration - spent_[i], 0.0);
  }
  return b;
}

Decision MyopicScheme::decide(const FrameInput& frame, int t) {
  const auto start = Clock::now();
  const auto b = budgets(t);
  const ActionEvaluator eval = [&](const OffloadAction& x) {
    return solve_myopic_allocation(x, frame, b, cfg_, opts_.allocator);
  };
  auto result = cfg_.n_wd <= opts_.myopic_exhaustive_limit ? exhaustive_best(eval, cfg_.n_wd)
                                                           : coordinate_descent_best(eval, cfg_.n_wd);
  Decision d;
  d.decide_ms = elapsed_ms(start);
  d.action = std::move(result.action);
  d.allocation = std::move(result.allocation);
  // report the drift-plus-penalty value so G is comparable across schemes
  d.allocation.value = per_frame_objective(d.action, d.allocation.y,
                                           {frame.data_queue, frame.energy_queue}, frame.channel, cfg_);
  return d;
}

void MyopicScheme::commit(std::span<const double> power) {
  for (std::size_t i = 0; i < spent_.size(); ++i) spent_[i] += power[i] * cfg_.frame_duration;
}

// --- LyDROO -----------------------------------------------------------------

LyDrooScheme::LyDrooScheme(const SystemConfig& cfg, const AgentConfig& agent, std::uint64_t seed,
                           const SchemeOptions& opts)
    : cfg_(validate_config(cfg)),
      agent_(agent),
      opts_(opts),
      reference_gain_(0.0),
      net_([&] {
        validate_agent_config(agent);
        auto rng = make_stream(seed, Stream::kNetworkInit);
        return PolicyNetwork::random(cfg.n_wd, agent, rng);
      }()),
      quantizer_(cfg.n_wd, agent.mt_update_interval, make_stream(seed, Stream::kQuantizerNoise)),
      learner_(agent, net_.parameter_count(), make_stream(seed, Stream::kReplaySampling)) {
  validate_allocator_options(opts.allocator);
  for (const auto& wd : cfg_.per_wd) reference_gain_ = std::max(reference_gain_, mean_gain(wd.distance));
}

LyDrooScheme::~LyDrooScheme() {
  if (pending_.valid()) pending_.wait();
}

std::optional<double> LyDrooScheme::join_training() {
  if (!pending_.valid()) return std::nullopt;
  auto [trained, loss] = pending_.get();
  net_ = std::move(trained);
  return loss;
}

Decision LyDrooScheme::decide(const FrameInput& frame, int t) {
  Decision d;
  d.loss = join_training();
  if (t % agent_.mt_update_interval == 0) quantizer_.update();

  const auto start = Clock::now();
  auto features =
      policy_features(frame, reference_gain_, agent_.queue_feature_scale, agent_.energy_feature_scale);
  const auto relaxed = net_.forward(features);
  const auto candidates = quantizer_.candidates(relaxed);

  // duplicates are scored once; the first index of the best action is kept
  std::unordered_map<std::uint64_t, std::size_t> scored;
  std::vector<Allocation> allocations;
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  std::size_t best_alloc = 0;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const auto code = candidates[j].code();
    auto it = scored.find(code);
    if (it == scored.end()) {
      allocations.push_back(solve_allocation(candidates[j], frame, cfg_, opts_.allocator));
      it = scored.emplace(code, allocations.size() - 1).first;
    }
    const double value = allocations[it->second].value;
    if (value > best_value) {
      best_value = value;
      best = j;
      best_alloc = it->second;
    }
  }
  d.decide_ms = elapsed_ms(start);

  const int count = quantizer_.candidate_count();
  const int order = static_cast<int>(best) % (count / 2);
  d.action = candidates[best];
  d.allocation = std::move(allocations[best_alloc]);
  d.candidates = count;
  d.best_index = static_cast<int>(best);
  d.best_order = order;
  quantizer_.record(order);

  learner_.store(std::move(features), d.action);
  if (opts_.training && learner_.should_train(t)) {
    if (opts_.concurrent_training) {
      auto batch = learner_.draw_batch();
      pending_ = std::async(std::launch::async, [this, net = net_, batch = std::move(batch)]() mutable {
        const double loss = learner_.train_on(net, batch);
        return std::make_pair(std::move(net), loss);
      });
    } else {
      d.loss = learner_.maybe_train(net_, t);
    }
  }
  return d;
}

std::unique_ptr<Scheme> make_scheme(SchemeKind kind, const SystemConfig& cfg,
                                    const AgentConfig& agent, std::uint64_t seed,
                                    const SchemeOptions& opts) {
  switch (kind) {
    case SchemeKind::kLyDroo: return std::make_unique<LyDrooScheme>(cfg, agent, seed, opts);
    case SchemeKind::kMyopic: return std::make_unique<MyopicScheme>(cfg, opts);
    case SchemeKind::kLyCd:
    case SchemeKind::kExhaustive: return std::make_unique<SearchScheme>(kind, cfg, opts);
  }
  throw ConfigError("unknown scheme");
}

// --- frame loop ---------------------------------------------------------------

StepResult step(Scheme& scheme, Environment& env, const QueueState& queues, int t,
                const SystemConfig& cfg) {
  if (t < 1) throw std::invalid_argument("frame index must be >= 1");
  FrameRecord rec;
  rec.frame = t;
  rec.input = FrameInput{env.sample_channels(), queues.data, queues.energy};

  auto d = scheme.decide(rec.input, t);
  if (auto why = allocation_violation(d.action, d.allocation.y, rec.input, cfg)) {
    throw std::logic_error("frame " + std::to_string(t) + " (" + std::string(scheme_name(scheme.kind())) +
                           "): infeasible allocation: " + *why);
  }
  auto re = frame_rate_energy(d.action, d.allocation.y, rec.input.channel, cfg);
  rec.processed.resize(re.rate.size());
  for (std::size_t i = 0; i < re.rate.size(); ++i) rec.processed[i] = re.rate[i] * cfg.frame_duration;
  rec.arrivals = env.sample_arrivals();

  StepResult out;
  out.queues = update_queues(queues, rec.processed, re.power, rec.arrivals, cfg);
  scheme.commit(re.power);

  rec.action = std::move(d.action);
  rec.allocation = std::move(d.allocation.y);
  rec.rate = std::move(re.rate);
  rec.power = std::move(re.power);
  rec.objective = d.allocation.value;
  rec.candidates = d.candidates;
  rec.best_index = d.best_index;
  rec.best_order = d.best_order;
  rec.loss = d.loss;
  rec.decide_ms = d.decide_ms;
  out.record = std::move(rec);
  return out;
}

}  // namespace mec
