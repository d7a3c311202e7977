#include <doctest.h>

#include <cmath>
#include <random>

#include "mec/allocator.hpp"
#include "mec/environment.hpp"
#include "mec/queueing.hpp"
#include "support/grid_oracle.hpp"

using namespace mec;

namespace {

FrameInput frame_of(std::vector<double> h, std::vector<double> q, std::vector<double> y) {
  return FrameInput{std::move(h), std::move(q), std::move(y)};
}

}  // namespace

TEST_CASE("all-local allocation") {
  const auto cfg = default_config(1);
  const OffloadAction local(std::vector<std::uint8_t>{0});

  SUBCASE("no energy backlog, deep queue: full speed") {
    const auto a = solve_allocation(local, frame_of({3e-11}, {1e8}, {0.0}), cfg);
    CHECK(a.y.cpu[0] == doctest::Approx(3e8));
    CHECK(a.y.tau[0] == 0.0);
    // a = 100 + 20 * 1.5, r = 3 Mbit
    CHECK(a.value == doctest::Approx(130.0 * 3.0));
  }
  SUBCASE("short queue caps the frequency") {
    const auto a = solve_allocation(local, frame_of({3e-11}, {1e6}, {0.0}), cfg);
    CHECK(a.y.cpu[0] == doctest::Approx(1e8));
  }
  SUBCASE("empty queue idles the CPU") {
    const auto a = solve_allocation(local, frame_of({3e-11}, {0.0}, {50.0}), cfg);
    CHECK(a.y.cpu[0] == 0.0);
    CHECK(a.value == 0.0);
  }
  SUBCASE("energy backlog lowers the frequency to the stationary point") {
    const double y = 800.0;
    const auto frame = frame_of({3e-11}, {1e8}, {y});
    const auto a = solve_allocation(local, frame, cfg);
    const double w = (100.0 + 30.0) / 1e6;
    const double f = std::sqrt(w / (3.0 * 100.0 * 1e-26 * y));
    CHECK(f < 3e8);
    CHECK(a.y.cpu[0] == doctest::Approx(f).epsilon(1e-9));
    const double grid = oracle::drift_plus_penalty(local, frame, cfg);
    CHECK(a.value >= grid - 1e-9);
    CHECK(oracle::relative_gap(a.value, grid) < 1e-6);
  }
}

TEST_CASE("two offloading devices against the grid optimum") {
  const auto cfg = default_config(2);
  const OffloadAction both(std::vector<std::uint8_t>{1, 1});
  const auto frame = frame_of({3e-11, 1.5e-11}, {2e7, 1e7}, {50.0, 10.0});
  const auto a = solve_allocation(both, frame, cfg);
  const double grid = oracle::drift_plus_penalty(both, frame, cfg);
  CHECK(a.value >= grid - 1e-9 * std::abs(grid));
  CHECK(oracle::relative_gap(a.value, grid) < 1e-3);
  CHECK(a.y.tau[0] + a.y.tau[1] <= 1.0 + kTol);
  CHECK_FALSE(allocation_violation(both, a.y, frame, cfg).has_value());
}

TEST_CASE("random instances are feasible and near the grid optimum") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 8; ++k) {
    const auto cfg = default_config(3);
    const auto frame = oracle::random_frame(cfg, rng);
    const auto x = oracle::random_action(3, rng);
    const auto a = solve_allocation(x, frame, cfg);
    CAPTURE(x.to_string());
    CHECK_FALSE(allocation_violation(x, a.y, frame, cfg).has_value());
    const double grid = oracle::drift_plus_penalty(x, frame, cfg, {200, 400, 1e5});
    CHECK(a.value >= grid - 1e-9 * std::max(1.0, std::abs(grid)));
    CHECK(a.value == doctest::Approx(per_frame_objective(x, a.y, {frame.data_queue, frame.energy_queue},
                                                         frame.channel, cfg))
                         .epsilon(1e-9));
  }
}

TEST_CASE("empty backlog gates the device") {
  const auto cfg = default_config(2);
  const OffloadAction both(std::vector<std::uint8_t>{1, 1});
  const auto a = solve_allocation(both, frame_of({3e-11, 3e-11}, {0.0, 1e7}, {0.0, 0.0}), cfg);
  CHECK(a.y.tau[0] == 0.0);
  CHECK(a.y.offload_energy[0] == 0.0);
  CHECK(a.y.tau[1] > 0.0);
}

TEST_CASE("value grows with backlog and channel gain") {
  const auto cfg = default_config(2);
  const OffloadAction x(std::vector<std::uint8_t>{1, 0});
  double prev = -1.0;
  for (double q = 1e6; q <= 4e7; q += 3e6) {
    const double v = solve_allocation(x, frame_of({3e-11, 2e-11}, {q, 5e6}, {20.0, 20.0}), cfg).value;
    CHECK(v >= prev - 1e-9);
    prev = v;
  }
  prev = -1.0;
  for (double h = 1e-12; h <= 1e-10; h *= 1.5) {
    const double v = solve_allocation(x, frame_of({h, 2e-11}, {2e7, 5e6}, {20.0, 20.0}), cfg).value;
    CHECK(v >= prev - 1e-9);
    prev = v;
  }
}

TEST_CASE("golden-section and closed-form airtime searches agree") {
  std::mt19937_64 rng(5);
  AllocatorOptions golden;
  golden.airtime_search = AirtimeSearch::kGoldenSection;
  for (int k = 0; k < 20; ++k) {
    const auto cfg = default_config(6);
    const auto frame = oracle::random_frame(cfg, rng);
    const auto x = oracle::random_action(6, rng);
    const double a = solve_allocation(x, frame, cfg).value;
    const double b = solve_allocation(x, frame, cfg, golden).value;
    CHECK(oracle::relative_gap(a, b) < 1e-6);
  }
}

TEST_CASE("allocator options are validated") {
  AllocatorOptions o;
  CHECK_NOTHROW(validate_allocator_options(o));
  o.dual_tol = 0.0;
  CHECK_THROWS_AS(validate_allocator_options(o), ConfigError);
  o = {};
  o.max_iters = 0;
  CHECK_THROWS_AS(validate_allocator_options(o), ConfigError);
  o = {};
  o.inner_tol = -1.0;
  CHECK_THROWS_AS(validate_allocator_options(o), ConfigError);
}

TEST_CASE("myopic allocation") {
  const auto cfg = default_config(2);
  const auto frame = frame_of({3e-11, 2e-11}, {4e7, 4e7}, {0.0, 0.0});

  SUBCASE("no budget, no work") {
    const std::vector<double> zero{0.0, 0.0};
    for (std::uint64_t code = 0; code < 4; ++code) {
      const auto x = OffloadAction::from_code(code, 2);
      const auto a = solve_myopic_allocation(x, frame, zero, cfg);
      CHECK(a.value == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
  SUBCASE("slack budget runs local CPUs flat out") {
    const std::vector<double> lots{10.0, 10.0};
    const auto a = solve_myopic_allocation(OffloadAction(2), frame, lots, cfg);
    CHECK(a.y.cpu[0] == doctest::Approx(3e8));
    CHECK(a.y.cpu[1] == doctest::Approx(3e8));
    CHECK(a.value == doctest::Approx(1.5 * 3e6 + 3e6));
  }
  SUBCASE("tight budget matches the grid optimum") {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 5; ++k) {
      const auto f = oracle::random_frame(cfg, rng);
      const auto x = oracle::random_action(2, rng);
      const std::vector<double> budget{0.02, 0.05};
      const auto a = solve_myopic_allocation(x, f, budget, cfg);
      CAPTURE(x.to_string());
      CHECK_FALSE(allocation_violation(x, a.y, f, cfg).has_value());
      const auto re = frame_rate_energy(x, a.y, f.channel, cfg);
      CHECK(re.power[0] <= budget[0] + 1e-9);
      CHECK(re.power[1] <= budget[1] + 1e-9);
      const double grid = oracle::weighted_rate(x, f, budget, cfg);
      CHECK(a.value >= grid - 1e-6 * std::max(1.0, grid));
      CHECK(oracle::relative_gap(a.value, grid) < 1e-3);
    }
  }
}
