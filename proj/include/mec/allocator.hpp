#pragma once

#include <span>

#include "mec/config.hpp"
#include "mec/types.hpp"

namespace mec {

/// How a device's best airtime for a given multiplier is found.
/// Both reach the same optimum; the closed form is much faster.
enum class AirtimeSearch {
  kClosedForm,     // stationarity solved through the Lambert W function
  kGoldenSection,  // 1-D search on the concave per-device objective
};

struct AllocatorOptions {
  /// Stop the multiplier search once the airtime residual 1 - sum(tau) is below this.
  double dual_tol = 1e-6;
  /// Bracket width of the golden-section search, and relative tolerance of
  /// the scalar root searches.
  double inner_tol = 1e-9;
  int max_iters = 200;
  AirtimeSearch airtime_search = AirtimeSearch::kClosedForm;
};

void validate_allocator_options(const AllocatorOptions& opts);

struct Allocation {
  ResourceAllocation y;
  double value = 0.0;
};

/// Optimal continuous resource allocation for a fixed offloading action.
///
/// Local devices get the closed-form CPU frequency that balances weighted bits
/// against the energy penalty. Offloading devices share the frame through a
/// single airtime multiplier: each device's best response to a multiplier
/// maximises its concave value-of-airtime curve minus the airtime price, the
/// multiplier is bisected until the frame is full, and the two bracketing
/// responses are blended so airtime sums to exactly one.
///
/// `value` is the drift-plus-penalty objective G(x, frame).
Allocation solve_allocation(const OffloadAction& x, const FrameInput& frame,
                            const SystemConfig& cfg, const AllocatorOptions& opts = {});

/// Per-frame weighted-rate maximisation that ignores backlogs apart from the
/// causality caps, with an extra per-device energy budget for this frame.
/// `value` is sum_i c_i r_i.
Allocation solve_myopic_allocation(const OffloadAction& x, const FrameInput& frame,
                                   std::span<const double> energy_budgets,
                                   const SystemConfig& cfg, const AllocatorOptions& opts = {});

}  // namespace mec
