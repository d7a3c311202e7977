#include <doctest.h>

#include <cmath>

#include "mec/engine.hpp"

using namespace mec;

namespace {

struct Trace {
  std::vector<FrameRecord> records;
  QueueState final;
};

Trace run(Scheme& scheme, const SystemConfig& cfg, int frames, std::uint64_t seed) {
  Environment env(cfg, seed);
  Trace out{{}, QueueState::zeros(cfg.size())};
  for (int t = 1; t <= frames; ++t) {
    auto s = step(scheme, env, out.final, t, cfg);
    out.final = std::move(s.queues);
    out.records.push_back(std::move(s.record));
  }
  return out;
}

SystemConfig single(double distance, double cpu_max) {
  auto cfg = default_config(1);
  cfg.per_wd[0].distance = distance;
  cfg.per_wd[0].cpu_max = cpu_max;
  return cfg;
}

}  // namespace

TEST_CASE("single device: the learned policy settles on the dominant mode") {
  for (const auto& cfg : {single(5000.0, 3e8), single(10.0, 1e5)}) {
    LyDrooScheme lydroo(cfg, AgentConfig{}, 1, {});
    const auto trace = run(lydroo, cfg, 1000, 1);
    SearchScheme exhaustive(SchemeKind::kExhaustive, cfg, {});
    SearchScheme cd(SchemeKind::kLyCd, cfg, {});
    MyopicScheme myopic(cfg, {});
    int agree = 0;
    for (std::size_t k = 800; k < trace.records.size(); ++k) {
      const auto& rec = trace.records[k];
      const auto best = exhaustive.decide(rec.input, rec.frame);
      CHECK(rec.objective <= best.allocation.value + 1e-9 * std::abs(best.allocation.value));
      CHECK(cd.decide(rec.input, rec.frame).action == best.action);
      if (rec.action == best.action) ++agree;
    }
    CHECK(agree == 200);
    const auto myo = run(myopic, cfg, 1000, 1);
    const bool offload = cfg.per_wd[0].distance < 100.0;
    int same_mode = 0;
    for (std::size_t k = 800; k < 1000; ++k) same_mode += myo.records[k].action.offloads(0) == offload ? 1 : 0;
    CHECK(same_mode >= 190);
  }
}

TEST_CASE("learned decisions never beat exhaustive search") {
  const auto cfg = default_config(4);
  LyDrooScheme lydroo(cfg, AgentConfig{}, 3, {});
  SearchScheme exhaustive(SchemeKind::kExhaustive, cfg, {});
  const auto trace = run(lydroo, cfg, 300, 3);
  for (const auto& rec : trace.records) {
    const double best = exhaustive.decide(rec.input, rec.frame).allocation.value;
    CHECK(rec.objective <= best + 1e-9 * std::max(1.0, std::abs(best)));
  }
}

TEST_CASE("first frame objective is the weighted rate penalty term") {
  const auto cfg = default_config(3);
  SearchScheme cd(SchemeKind::kLyCd, cfg, {});
  const auto trace = run(cd, cfg, 1, 9);
  const auto& rec = trace.records[0];
  double expected = 0.0;
  for (std::size_t i = 0; i < 3; ++i) expected += cfg.lyapunov_v * cfg.per_wd[i].weight * rec.rate[i] / cfg.queue_unit;
  CHECK(rec.objective == doctest::Approx(expected));
}

TEST_CASE("backlog drains without arrivals") {
  const auto cfg = default_config(2);
  SearchScheme cd(SchemeKind::kLyCd, cfg, {});
  Environment env(cfg, 4);
  QueueState q{{2e7, 2e7}, {0.0, 0.0}};
  const std::vector<double> none{0.0, 0.0};
  int t = 1;
  for (; t <= 100 && q.data[0] + q.data[1] > 0.0; ++t) {
    const FrameInput f{env.sample_channels(), q.data, q.energy};
    const auto d = cd.decide(f, t);
    const auto re = frame_rate_energy(d.action, d.allocation.y, f.channel, cfg);
    std::vector<double> processed(re.rate);
    const auto next = update_queues(q, processed, re.power, none, cfg);
    CHECK(next.data[0] + next.data[1] < q.data[0] + q.data[1]);
    q = next;
  }
  CHECK(q.data[0] + q.data[1] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("a generous power threshold keeps the energy backlog empty") {
  auto cfg = default_config(3);
  for (auto& wd : cfg.per_wd) wd.power_threshold = 1e3;
  SearchScheme cd(SchemeKind::kLyCd, cfg, {});
  const auto trace = run(cd, cfg, 200, 2);
  for (const auto& rec : trace.records) {
    for (double y : rec.input.energy_queue) CHECK(y == 0.0);
  }
}

TEST_CASE("myopic scheme respects the running energy budget") {
  const auto cfg = default_config(3);
  MyopicScheme myopic(cfg, {});
  Environment env(cfg, 8);
  auto q = QueueState::zeros(3);
  std::vector<double> prev(3, 0.0);
  for (int t = 1; t <= 300; ++t) {
    auto s = step(myopic, env, q, t, cfg);
    q = std::move(s.queues);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(myopic.spent()[i] >= prev[i]);
      CHECK(myopic.spent()[i] / t <= cfg.per_wd[i].power_threshold + 1e-9);
      prev[i] = myopic.spent()[i];
    }
  }
}

TEST_CASE("equal seeds give identical runs") {
  const auto cfg = default_config(3);
  LyDrooScheme a(cfg, AgentConfig{}, 5, {}), b(cfg, AgentConfig{}, 5, {});
  const auto ta = run(a, cfg, 700, 5);
  const auto tb = run(b, cfg, 700, 5);
  for (std::size_t k = 0; k < ta.records.size(); ++k) {
    CHECK(ta.records[k].action == tb.records[k].action);
    CHECK(ta.records[k].objective == tb.records[k].objective);
    CHECK(ta.records[k].loss == tb.records[k].loss);
  }
  CHECK(a.network() == b.network());
}

TEST_CASE("concurrent training produces losses and feasible frames") {
  const auto cfg = default_config(3);
  SchemeOptions opts;
  opts.concurrent_training = true;
  LyDrooScheme s(cfg, AgentConfig{}, 6, opts);
  const auto trace = run(s, cfg, 700, 6);
  int losses = 0;
  for (const auto& rec : trace.records) losses += rec.loss.has_value() ? 1 : 0;
  CHECK(losses > 0);
}

TEST_CASE("disabled training keeps the initial network") {
  const auto cfg = default_config(2);
  SchemeOptions opts;
  opts.training = false;
  LyDrooScheme s(cfg, AgentConfig{}, 7, opts);
  const auto initial = s.network();
  const auto trace = run(s, cfg, 600, 7);
  CHECK(s.network() == initial);
  for (const auto& rec : trace.records) CHECK_FALSE(rec.loss.has_value());
  CHECK(s.learner().memory().size() == 600);
}

TEST_CASE("candidate bookkeeping") {
  const auto cfg = default_config(4);
  LyDrooScheme s(cfg, AgentConfig{}, 2, {});
  const auto trace = run(s, cfg, 200, 2);
  for (const auto& rec : trace.records) {
    REQUIRE(rec.candidates.has_value());
    const int m = *rec.candidates;
    CHECK(m % 2 == 0);
    CHECK(m >= 2);
    CHECK(m <= 8);
    CHECK(*rec.best_index < m);
    CHECK(*rec.best_order == *rec.best_index % (m / 2));
  }
}

TEST_CASE("argument checks") {
  const auto cfg = default_config(2);
  SearchScheme cd(SchemeKind::kLyCd, cfg, {});
  Environment env(cfg, 1);
  CHECK_THROWS_AS(step(cd, env, QueueState::zeros(2), 0, cfg), std::invalid_argument);
  CHECK(parse_scheme("lycd") == SchemeKind::kLyCd);
  CHECK(parse_scheme("exhaustive") == SchemeKind::kExhaustive);
  CHECK_THROWS_AS(parse_scheme("LyDROO"), ConfigError);
  CHECK_THROWS_AS(parse_scheme(""), ConfigError);
  CHECK_THROWS_AS(SearchScheme(SchemeKind::kMyopic, cfg, {}), ConfigError);
  for (auto kind : {SchemeKind::kLyDroo, SchemeKind::kLyCd, SchemeKind::kMyopic, SchemeKind::kExhaustive}) {
    CHECK(make_scheme(kind, cfg, AgentConfig{}, 1)->kind() == kind);
  }
}
