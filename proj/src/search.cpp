#include "mec/search.hpp"

#include <cmath>
#include <cstdint>

namespace mec {

SearchResult exhaustive_best(const ActionEvaluator& evaluate, int n) {
  if (n < 1) throw ConfigError("n_wd must be >= 1");
  if (n > kMaxExhaustiveDevices) {
    throw ConfigError("n_wd too large for exhaustive search (max " +
                      std::to_string(kMaxExhaustiveDevices) + ")");
  }
  const auto size = static_cast<std::size_t>(n);
  const std::uint64_t total = std::uint64_t{1} << n;
  SearchResult best;
  for (std::uint64_t code = 0; code < total; ++code) {
    auto x = OffloadAction::from_code(code, size);
    auto alloc = evaluate(x);
    ++best.evaluations;
    if (code == 0 || alloc.value > best.allocation.value) {
      best.action = std::move(x);
      best.allocation = std::move(alloc);
    }
  }
  return best;
}

SearchResult exhaustive_best(const FrameInput& frame, const SystemConfig& cfg,
                             const AllocatorOptions& opts) {
  return exhaustive_best(
      [&](const OffloadAction& x) { return solve_allocation(x, frame, cfg, opts); }, cfg.n_wd);
}

SearchResult coordinate_descent_best(const ActionEvaluator& evaluate, int n, int max_sweeps) {
  if (n < 1) throw ConfigError("n_wd must be >= 1");
  if (max_sweeps <= 0) max_sweeps = n;
  const auto size = static_cast<std::size_t>(n);

  SearchResult cur;
  cur.action = OffloadAction(size);
  cur.allocation = evaluate(cur.action);
  cur.evaluations = 1;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double threshold = cur.allocation.value + 1e-9 * std::abs(cur.allocation.value);
    std::size_t best_flip = size;
    Allocation best_alloc;
    for (std::size_t i = 0; i < size; ++i) {
      auto x = cur.action;
      x.flip(i);
      auto alloc = evaluate(x);
      ++cur.evaluations;
      // strict comparison keeps the lowest index among equal-best flips
      if (alloc.value > threshold && (best_flip == size || alloc.value > best_alloc.value)) {
        best_flip = i;
        best_alloc = std::move(alloc);
      }
    }
    if (best_flip == size) break;
    cur.action.flip(best_flip);
    cur.allocation = std::move(best_alloc);
  }
  return cur;
}

SearchResult coordinate_descent_best(const FrameInput& frame, const SystemConfig& cfg,
                                     const AllocatorOptions& opts) {
  return coordinate_descent_best(
      [&](const OffloadAction& x) { return solve_allocation(x, frame, cfg, opts); }, cfg.n_wd);
}

}  // namespace mec
