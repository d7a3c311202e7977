#include <doctest.h>

#include <cmath>
#include <random>

#include "mec/queueing.hpp"

using namespace mec;

namespace {

SystemConfig unit_rate_config() {
  auto cfg = default_config(1);
  cfg.rate_overhead = 1.0;
  return cfg;
}

}  // namespace

TEST_CASE("local computation") {
  const auto cfg = default_config(1);
  const auto out = local_bits_energy(1e8, cfg);
  CHECK(out.bits == doctest::Approx(1e6));
  CHECK(out.joules == doctest::Approx(0.01));
  const auto zero = local_bits_energy(0.0, cfg);
  CHECK(zero.bits == 0.0);
  CHECK(zero.joules == 0.0);
  const auto twice = local_bits_energy(2e8, cfg);
  CHECK(twice.bits == doctest::Approx(2.0 * out.bits));
  CHECK(twice.joules == doctest::Approx(8.0 * out.joules));
  CHECK_THROWS_AS(local_bits_energy(-1.0, cfg), ConfigError);
}

TEST_CASE("offloaded bits") {
  const auto cfg = unit_rate_config();
  CHECK(offload_bits(0.5, 0.0, 1e-10, cfg) == 0.0);
  CHECK(offload_bits(0.0, 0.0, 1e-10, cfg) == 0.0);
  // e h / (tau N0) = 3
  const double gain = 1e-10;
  const double energy = 3.0 * 0.5 * cfg.noise_power / gain;
  CHECK(offload_bits(0.5, energy, gain, cfg) == doctest::Approx(2e6).epsilon(1e-12));
  CHECK_THROWS_AS(offload_bits(0.0, 0.01, gain, cfg), ConfigError);
  CHECK_THROWS_AS(offload_bits(-0.1, 0.0, gain, cfg), ConfigError);
}

TEST_CASE("offloaded bits are increasing and concave in energy") {
  const auto cfg = default_config(1);
  const double gain = 3e-11;
  const double tau = 0.3;
  const double step = 1e-4;
  double prev = offload_bits(tau, 0.0, gain, cfg);
  double prev_diff = INFINITY;
  for (int k = 1; k <= 300; ++k) {
    const double cur = offload_bits(tau, k * step, gain, cfg);
    const double diff = cur - prev;
    CHECK(diff > 0.0);
    CHECK(diff < prev_diff);
    prev = cur;
    prev_diff = diff;
  }
}

TEST_CASE("per-device rate and power dispatch on the action") {
  const auto cfg = default_config(3);
  const std::vector<double> h{3e-11, 2e-11, 1e-11};
  const OffloadAction x(std::vector<std::uint8_t>{0, 1, 1});
  auto y = ResourceAllocation::zeros(3);
  y.cpu[0] = 1e8;
  y.tau[1] = 0.4;
  y.offload_energy[1] = 0.03;
  y.offload_rate[1] = 5e5;
  const auto re = frame_rate_energy(x, y, h, cfg);
  CHECK(re.rate[0] == doctest::Approx(1e6));
  CHECK(re.power[0] == doctest::Approx(0.01));
  CHECK(re.rate[1] == doctest::Approx(offload_bits(0.4, 0.03, h[1], cfg)));
  CHECK(re.power[1] == doctest::Approx(0.03));
  CHECK(re.rate[2] == 0.0);
  CHECK(re.power[2] == 0.0);
}

TEST_CASE("queue recursions") {
  auto cfg = default_config(1);
  SUBCASE("data backlog") {
    const auto next = update_queues({{5e6}, {0.0}}, std::vector{2e6}, std::vector{0.0}, std::vector{1e6}, cfg);
    CHECK(next.data[0] == doctest::Approx(4e6));
  }
  SUBCASE("energy backlog grows above the threshold") {
    const auto next = update_queues({{0.0}, {0.0}}, std::vector{0.0}, std::vector{0.1}, std::vector{0.0}, cfg);
    CHECK(next.energy[0] == doctest::Approx(20.0));
  }
  SUBCASE("energy backlog is clamped at zero") {
    const auto next = update_queues({{0.0}, {5.0}}, std::vector{0.0}, std::vector{0.05}, std::vector{0.0}, cfg);
    CHECK(next.energy[0] == 0.0);
  }
  SUBCASE("processing more than the backlog is an error") {
    CHECK_THROWS_AS(update_queues({{1e6}, {0.0}}, std::vector{1e6 + 1.0}, std::vector{0.0}, std::vector{0.0}, cfg),
                    std::logic_error);
  }
}

TEST_CASE("energy hinge holds with equality in one branch") {
  const auto cfg = default_config(1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> y(0.0, 100.0), e(0.0, 0.2);
  for (int k = 0; k < 200; ++k) {
    const double y0 = y(rng);
    const double p = e(rng);
    const auto next = update_queues({{0.0}, {y0}}, std::vector{0.0}, std::vector{p}, std::vector{0.0}, cfg);
    const double linear = y0 + cfg.energy_queue_scale * (p - cfg.per_wd[0].power_threshold);
    CHECK(next.energy[0] >= 0.0);
    CHECK(next.energy[0] >= linear - 1e-9);
    CHECK((next.energy[0] == 0.0 || std::abs(next.energy[0] - linear) < 1e-9));
  }
}

TEST_CASE("objective coefficients") {
  auto cfg = default_config(2);
  cfg.queue_unit = 1.0;
  auto c = objective_coefficients({{0.0, 1e6}, {0.0, 7.0}}, cfg);
  CHECK(c.a[0] == doctest::Approx(30.0));
  CHECK(c.a[1] == doctest::Approx(1000020.0));
  CHECK(c.y[1] == 7.0);

  cfg.queue_unit = 1e6;
  c = objective_coefficients({{0.0, 1e6}, {0.0, 0.0}}, cfg);
  CHECK(c.a[0] == doctest::Approx(30.0));
  CHECK(c.a[1] == doctest::Approx(21.0));

  double prev = -1.0;
  for (double q = 0.0; q < 1e8; q += 1e6) {
    const double a = objective_coefficients({{q, 0.0}, {0.0, 0.0}}, cfg).a[0];
    CHECK(a >= prev);
    prev = a;
  }
}

TEST_CASE("drift-plus-penalty value") {
  const auto cfg = default_config(3);
  const std::vector<double> h{3e-11, 2e-11, 1e-11};
  const QueueState q{{4e6, 2e6, 1e6}, {10.0, 0.0, 30.0}};
  const OffloadAction x(std::vector<std::uint8_t>{1, 0, 0});
  auto y = ResourceAllocation::zeros(3);

  CHECK(per_frame_objective(x, y, q, h, cfg) == 0.0);

  y.tau[0] = 0.5;
  y.offload_energy[0] = 0.02;
  y.offload_rate[0] = 3e6;
  y.cpu[1] = 1.5e8;
  y.cpu[2] = 5e7;

  // terms summed by hand: local r = f / phi, e = kappa f^3
  const double a0 = 4.0 + 20.0 * 1.5, a1 = 2.0 + 20.0 * 1.0, a2 = 1.0 + 20.0 * 1.5;
  const double r1 = 1.5e6, r2 = 5e5;
  const double e1 = 1e-26 * 1.5e8 * 1.5e8 * 1.5e8, e2 = 1e-26 * 5e7 * 5e7 * 5e7;
  const double r0 = offload_bits(0.5, 0.02, h[0], cfg);
  const double expected = a0 * r0 / 1e6 + a1 * r1 / 1e6 + a2 * r2 / 1e6 - 10.0 * 0.02 - 0.0 * e1 - 30.0 * e2;
  CHECK(per_frame_objective(x, y, q, h, cfg) == doctest::Approx(expected).epsilon(1e-12));

  const QueueState no_energy{q.data, {0.0, 0.0, 0.0}};
  CHECK(per_frame_objective(x, y, no_energy, h, cfg) >= 0.0);
}

TEST_CASE("objective doubles when queues, V and energy backlogs double") {
  auto cfg = default_config(2);
  const std::vector<double> h{3e-11, 2e-11};
  const QueueState q{{4e6, 2e6}, {10.0, 20.0}};
  const OffloadAction x(std::vector<std::uint8_t>{1, 0});
  auto y = ResourceAllocation::zeros(2);
  y.tau = {0.3, 0.0};
  y.offload_energy = {0.01, 0.0};
  y.cpu = {0.0, 2e8};
  const double base = per_frame_objective(x, y, q, h, cfg);
  cfg.lyapunov_v *= 2.0;
  const QueueState doubled{{8e6, 4e6}, {20.0, 40.0}};
  CHECK(per_frame_objective(x, y, doubled, h, cfg) == doctest::Approx(2.0 * base).epsilon(1e-12));
}
