#include "mec/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/lambert_w.hpp>
#include <boost/math/tools/roots.hpp>

#include "mec/queueing.hpp"

namespace mec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = std::numbers::ln2;

// Shape of the value-of-airtime curve g(tau) beyond the linear phase.
enum class Tail {
  kFlat,    // backlog exhausted; more airtime buys nothing
  kEnergy,  // backlog cap reached, extra airtime lowers the energy needed
  kBudget,  // energy budget exhausted, extra airtime raises the rate
};

// One offloading device. g(tau) = max_e [weight * min(Q, R(tau, e)) - penalty * e]
// is concave and piecewise: linear with `slope` up to `knee`, then a tail.
struct OffloadCurve {
  double weight = 0.0;   // objective per bit
  double penalty = 0.0;  // objective per joule
  double gain = 0.0;
  double queue = 0.0;
  double power = 0.0;    // transmit power while in the linear phase
  double budget = kInf;  // joules available this frame
  double slope = 0.0;
  double knee = 0.0;
  double flat_from = kInf;  // start of the flat phase of a budget tail
  Tail tail = Tail::kFlat;
};

struct LinkConstants {
  double capacity;  // W / v_u, bits per unit airtime per bit/Hz
  double noise;
};

double rate(const LinkConstants& link, double tau, double energy, double gain) {
  if (tau <= 0.0) return 0.0;
  return link.capacity * tau * std::log1p(energy * gain / (tau * link.noise)) / kLn2;
}

// Energy that delivers exactly `bits` over airtime `tau`.
double energy_for_bits(const LinkConstants& link, double tau, double bits, double gain) {
  if (tau <= 0.0) return bits > 0.0 ? kInf : 0.0;
  return std::expm1(bits * kLn2 / (link.capacity * tau)) * tau * link.noise / gain;
}

double curve_energy(const OffloadCurve& c, const LinkConstants& link, double tau) {
  if (tau <= 0.0) return 0.0;
  return std::min({c.power * tau, c.budget, energy_for_bits(link, tau, c.queue, c.gain)});
}

OffloadCurve finish_curve(OffloadCurve c, const LinkConstants& link, const AllocatorOptions& opts) {
  if (c.queue <= 0.0 || c.power <= 0.0 || c.budget <= 0.0) {
    c.slope = 0.0;
    return c;
  }
  const double rate_per_tau = rate(link, 1.0, c.power, c.gain);
  c.slope = c.weight * rate_per_tau - c.penalty * c.power;
  const double tau_full = c.queue / rate_per_tau;
  const double tau_budget = c.budget / c.power;
  if (tau_full <= tau_budget) {
    c.knee = tau_full;
    c.tail = c.penalty > 0.0 ? Tail::kEnergy : Tail::kFlat;
    return c;
  }
  c.knee = tau_budget;
  c.tail = Tail::kBudget;
  if (rate(link, 1.0, c.budget, c.gain) <= c.queue) {
    c.flat_from = kInf;
  } else {
    const auto excess = [&](double tau) { return rate(link, tau, c.budget, c.gain) - c.queue; };
    std::uintmax_t iters = static_cast<std::uintmax_t>(opts.max_iters);
    const auto tol = [&](double a, double b) { return std::abs(b - a) <= opts.inner_tol * std::max(a, b); };
    const auto [lo, hi] = boost::math::tools::toms748_solve(excess, c.knee, 1.0, tol, iters);
    c.flat_from = hi;
    (void)lo;
  }
  return c;
}

double curve_value(const OffloadCurve& c, const LinkConstants& link, double tau) {
  const double e = curve_energy(c, link, tau);
  return c.weight * std::min(c.queue, rate(link, tau, e, c.gain)) - c.penalty * e;
}

// Maximiser of g(tau) - mu * tau over [0, 1] by golden-section search.
double golden_airtime(const OffloadCurve& c, const LinkConstants& link, double mu, double tol) {
  if (!(c.slope > mu)) return 0.0;
  constexpr double kRatio = 0.6180339887498949;
  const auto f = [&](double tau) { return curve_value(c, link, tau) - mu * tau; };
  double lo = 0.0;
  double hi = 1.0;
  double x1 = hi - kRatio * (hi - lo);
  double x2 = lo + kRatio * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kRatio * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kRatio * (hi - lo);
      f1 = f(x1);
    }
  }
  return 0.5 * (lo + hi);
}

// Smallest maximiser of g(tau) - mu * tau over [0, 1].
double best_airtime(const OffloadCurve& c, const LinkConstants& link, double mu) {
  if (!(c.slope > mu)) return 0.0;
  if (c.knee >= 1.0) return 1.0;
  double tau = c.knee;
  switch (c.tail) {
    case Tail::kFlat:
      return c.knee;
    case Tail::kEnergy: {
      // g' = Y N0/h ((u-1) e^u + 1) with u = Q ln2 / (capacity tau)
      const double k = mu * c.gain / (c.penalty * link.noise);
      const double u = 1.0 + boost::math::lambert_w0((k - 1.0) / std::numbers::e);
      tau = u > 0.0 ? c.queue * kLn2 / (link.capacity * u) : kInf;
      break;
    }
    case Tail::kBudget: {
      // g' = weight capacity / ln2 * (ln(1+z) - z/(1+z)) with z = b h / (N0 tau)
      const double k = mu * kLn2 / (c.weight * link.capacity);
      const double s = k + 1.0 + boost::math::lambert_w0(-std::exp(-(k + 1.0)));
      const double z = std::expm1(s);
      tau = z > 0.0 ? c.budget * c.gain / (link.noise * z) : kInf;
      tau = std::min(tau, c.flat_from);
      break;
    }
  }
  return std::clamp(tau, c.knee, 1.0);
}

double best_airtimes(const std::vector<OffloadCurve>& curves, const LinkConstants& link, double mu,
                     const AllocatorOptions& opts, std::vector<double>& tau) {
  tau.resize(curves.size());
  double total = 0.0;
  for (std::size_t k = 0; k < curves.size(); ++k) {
    tau[k] = opts.airtime_search == AirtimeSearch::kClosedForm
                 ? best_airtime(curves[k], link, mu)
                 : golden_airtime(curves[k], link, mu, opts.inner_tol);
    total += tau[k];
  }
  return total;
}

// Airtime split that maximises sum_k g_k(tau_k) subject to sum tau <= 1.
std::vector<double> share_airtime(const std::vector<OffloadCurve>& curves, const LinkConstants& link,
                                  const AllocatorOptions& opts) {
  std::vector<double> tau_lo;
  double total_lo = best_airtimes(curves, link, 0.0, opts, tau_lo);
  if (total_lo <= 1.0) return tau_lo;

  double mu_lo = 0.0;
  double mu_hi = 0.0;
  for (const auto& c : curves) mu_hi = std::max(mu_hi, c.slope);
  std::vector<double> tau_hi;
  double total_hi = best_airtimes(curves, link, mu_hi, opts, tau_hi);

  std::vector<double> tau;
  for (int it = 0; it < opts.max_iters; ++it) {
    if (1.0 - total_hi <= opts.dual_tol) break;
    if (mu_hi - mu_lo <= 4.0 * std::numeric_limits<double>::epsilon() * mu_hi) break;
    const double mu = 0.5 * (mu_lo + mu_hi);
    const double total = best_airtimes(curves, link, mu, opts, tau);
    if (total > 1.0) {
      mu_lo = mu;
      tau_lo.swap(tau);
      total_lo = total;
    } else {
      mu_hi = mu;
      tau_hi.swap(tau);
      total_hi = total;
    }
  }
  // Responses are monotone in mu, so blending the bracket keeps every device
  // between two near-optimal responses while filling the frame exactly.
  const double theta = (1.0 - total_hi) / (total_lo - total_hi);
  tau.resize(curves.size());
  for (std::size_t k = 0; k < tau.size(); ++k) {
    tau[k] = tau_hi[k] + theta * (tau_lo[k] - tau_hi[k]);
  }
  return tau;
}

void fill_offloaders(const std::vector<std::size_t>& idx, const std::vector<OffloadCurve>& curves,
                     const LinkConstants& link, const AllocatorOptions& opts, ResourceAllocation& y) {
  if (idx.empty()) return;
  const auto tau = share_airtime(curves, link, opts);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& c = curves[k];
    const std::size_t i = idx[k];
    if (tau[k] <= 0.0 || c.slope <= 0.0) continue;
    const double e = curve_energy(c, link, tau[k]);
    y.tau[i] = tau[k];
    y.offload_energy[i] = e;
    y.offload_rate[i] = std::min(c.queue, rate(link, tau[k], e, c.gain));
  }
}

void check_inputs(const OffloadAction& x, const FrameInput& frame, const SystemConfig& cfg) {
  if (x.size() != cfg.size()) throw ConfigError("action length differs from n_wd");
  validate_frame(frame, cfg);
}

}  // namespace

void validate_allocator_options(const AllocatorOptions& opts) {
  if (!(opts.dual_tol > 0.0)) throw ConfigError("dual_tol must be positive");
  if (!(opts.inner_tol > 0.0)) throw ConfigError("inner_tol must be positive");
  if (opts.max_iters < 1) throw ConfigError("max_iters must be >= 1");
}

Allocation solve_allocation(const OffloadAction& x, const FrameInput& frame,
                            const SystemConfig& cfg, const AllocatorOptions& opts) {
  check_inputs(x, frame, cfg);
  const std::size_t n = cfg.size();
  const LinkConstants link{cfg.bandwidth / cfg.rate_overhead, cfg.noise_power};
  const QueueState state{frame.data_queue, frame.energy_queue};
  const auto coeff = objective_coefficients(state, cfg);

  auto y = ResourceAllocation::zeros(n);
  std::vector<std::size_t> offloaders;
  std::vector<OffloadCurve> curves;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& wd = cfg.per_wd[i];
    const double w = coeff.a[i] / cfg.queue_unit;
    const double penalty = coeff.y[i];
    const double q = frame.data_queue[i];
    if (!x.offloads(i)) {
      double f = std::min(wd.cpu_max, cfg.cycles_per_bit * q);
      if (penalty > 0.0) {
        f = std::min(f, std::sqrt(w / (3.0 * cfg.cycles_per_bit * cfg.energy_efficiency * penalty)));
      }
      y.cpu[i] = f;
      continue;
    }
    OffloadCurve c;
    c.weight = w;
    c.penalty = penalty;
    c.gain = frame.channel[i];
    c.queue = q;
    c.power = wd.tx_power_max;
    if (penalty > 0.0) {
      const double stationary = w * link.capacity / (kLn2 * penalty) - link.noise / c.gain;
      c.power = std::clamp(stationary, 0.0, wd.tx_power_max);
    }
    offloaders.push_back(i);
    curves.push_back(finish_curve(c, link, opts));
  }
  fill_offloaders(offloaders, curves, link, opts, y);
  const double g = per_frame_objective(x, y, state, frame.channel, cfg);
  return {std::move(y), g};
}

Allocation solve_myopic_allocation(const OffloadAction& x, const FrameInput& frame,
                                   std::span<const double> energy_budgets,
                                   const SystemConfig& cfg, const AllocatorOptions& opts) {
  check_inputs(x, frame, cfg);
  const std::size_t n = cfg.size();
  if (energy_budgets.size() != n) throw ConfigError("energy_budgets length differs from n_wd");
  const LinkConstants link{cfg.bandwidth / cfg.rate_overhead, cfg.noise_power};

  auto y = ResourceAllocation::zeros(n);
  std::vector<std::size_t> offloaders;
  std::vector<OffloadCurve> curves;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& wd = cfg.per_wd[i];
    const double budget = std::max(energy_budgets[i], 0.0);
    const double q = frame.data_queue[i];
    if (!x.offloads(i)) {
      y.cpu[i] = std::min({wd.cpu_max, cfg.cycles_per_bit * q,
                           std::cbrt(budget / (cfg.energy_efficiency * cfg.frame_duration))});
      continue;
    }
    OffloadCurve c;
    c.weight = wd.weight;
    c.gain = frame.channel[i];
    c.queue = q;
    c.power = wd.tx_power_max;
    c.budget = budget;
    offloaders.push_back(i);
    curves.push_back(finish_curve(c, link, opts));
  }
  fill_offloaders(offloaders, curves, link, opts, y);

  const auto re = frame_rate_energy(x, y, frame.channel, cfg);
  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i) value += cfg.per_wd[i].weight * re.rate[i];
  return {std::move(y), value};
}

}  // namespace mec
