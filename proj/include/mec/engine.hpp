#pragma once

#include <cstdint>
#include <future>
#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "mec/actor.hpp"
#include "mec/allocator.hpp"
#include "mec/environment.hpp"
#include "mec/learner.hpp"
#include "mec/queueing.hpp"
#include "mec/search.hpp"

namespace mec {

enum class SchemeKind { kLyDroo, kLyCd, kMyopic, kExhaustive };

std::string_view scheme_name(SchemeKind kind);
/// Accepts lydroo, lycd, myopic, exhaustive; throws ConfigError otherwise.
SchemeKind parse_scheme(std::string_view name);

struct SchemeOptions {
  AllocatorOptions allocator;
  /// Train the policy network; when off the actor keeps its initial policy.
  bool training = true;
  /// Run each training step on a worker thread while the frame executes.
  /// The trained parameters replace the actor's at the next decision.
  bool concurrent_training = false;
  /// Largest network for which the myopic scheme enumerates all actions;
  /// coordinate descent is used beyond it.
  int myopic_exhaustive_limit = 12;
};

struct Decision {
  OffloadAction action;
  Allocation allocation;
  std::optional<int> candidates;  // M_t
  std::optional<int> best_index;  // m_t
  std::optional<int> best_order;  // m*_t
  std::optional<double> loss;
  double decide_ms = 0.0;
};

/// A per-frame offloading policy. Owns whatever state the policy carries
/// between frames.
class Scheme {
 public:
  virtual ~Scheme() = default;
  [[nodiscard]] virtual SchemeKind kind() const = 0;
  /// Chooses the action and allocation for frame `t` (1-based).
  virtual Decision decide(const FrameInput& frame, int t) = 0;
  /// Realised per-device power of the frame just executed.
  virtual void commit(std::span<const double> /*power*/) {}
};

/// Queue-aware search over all actions or by coordinate descent.
class SearchScheme final : public Scheme {
 public:
  SearchScheme(SchemeKind kind, const SystemConfig& cfg, const SchemeOptions& opts);
  [[nodiscard]] SchemeKind kind() const override { return kind_; }
  Decision decide(const FrameInput& frame, int t) override;

 private:
  SchemeKind kind_;
  SystemConfig cfg_;
  SchemeOptions opts_;
};

/// Maximises this frame's weighted rate under a running energy budget
/// b_i = t gamma_i - sum_{l<t} e_i^l, ignoring backlogs.
class MyopicScheme final : public Scheme {
 public:
  MyopicScheme(const SystemConfig& cfg, const SchemeOptions& opts);
  [[nodiscard]] SchemeKind kind() const override { return SchemeKind::kMyopic; }
  Decision decide(const FrameInput& frame, int t) override;
  void commit(std::span<const double> power) override;

  [[nodiscard]] const std::vector<double>& spent() const { return spent_; }
  [[nodiscard]] std::vector<double> budgets(int t) const;

 private:
  SystemConfig cfg_;
  SchemeOptions opts_;
  std::vector<double> spent_;
};

/// Actor network + noisy order-preserving quantiser + allocation critic +
/// replay-memory learner.
class LyDrooScheme final : public Scheme {
 public:
  LyDrooScheme(const SystemConfig& cfg, const AgentConfig& agent, std::uint64_t seed,
               const SchemeOptions& opts);
  ~LyDrooScheme() override;
  [[nodiscard]] SchemeKind kind() const override { return SchemeKind::kLyDroo; }
  Decision decide(const FrameInput& frame, int t) override;

  [[nodiscard]] const PolicyNetwork& network() const { return net_; }
  [[nodiscard]] const NopQuantizer& quantizer() const { return quantizer_; }
  [[nodiscard]] const Learner& learner() const { return learner_; }

 private:
  std::optional<double> join_training();

  SystemConfig cfg_;
  AgentConfig agent_;
  SchemeOptions opts_;
  double reference_gain_;
  PolicyNetwork net_;
  NopQuantizer quantizer_;
  Learner learner_;
  std::future<std::pair<PolicyNetwork, double>> pending_;
};

std::unique_ptr<Scheme> make_scheme(SchemeKind kind, const SystemConfig& cfg,
                                    const AgentConfig& agent, std::uint64_t seed,
                                    const SchemeOptions& opts = {});

struct StepResult {
  FrameRecord record;
  QueueState queues;
};

/// Runs frame `t`: observe channels, decide, execute, receive arrivals and
/// advance both queues. Infeasible allocations or causality violations throw
/// std::logic_error.
StepResult step(Scheme& scheme, Environment& env, const QueueState& queues, int t,
                const SystemConfig& cfg);

}  // namespace mec
