#pragma once

#include <functional>

#include "mec/allocator.hpp"

namespace mec {

/// Scores one binary action, e.g. by solving its resource allocation.
using ActionEvaluator = std::function<Allocation(const OffloadAction&)>;

struct SearchResult {
  OffloadAction action;
  Allocation allocation;
  int evaluations = 0;
};

inline constexpr int kMaxExhaustiveDevices = 20;

/// Enumerates all 2^n actions in increasing code order (device 0 is the most
/// significant bit) and keeps the first maximiser.
SearchResult exhaustive_best(const ActionEvaluator& evaluate, int n);
SearchResult exhaustive_best(const FrameInput& frame, const SystemConfig& cfg,
                             const AllocatorOptions& opts = {});

/// Best-flip coordinate descent from the all-local action. Each sweep scores
/// all n single-bit flips and applies the best one if it improves G by more
/// than 1e-9 |G|; stops at a single-flip local optimum or after `max_sweeps`
/// sweeps (n when non-positive).
SearchResult coordinate_descent_best(const ActionEvaluator& evaluate, int n, int max_sweeps = 0);
SearchResult coordinate_descent_best(const FrameInput& frame, const SystemConfig& cfg,
                                     const AllocatorOptions& opts = {});

}  // namespace mec
