#pragma once

#include <memory>
#include <string>
#include <vector>

#include "klr/core/match.hpp"
#include "klr/gateway/backend.hpp"
#include "klr/reasoning/prompts.hpp"

namespace klr {

// Prompt pipelines over a DecisionBackend. Each decider drives one seat of a
// match; anticipation calls inside K-Level Reasoning are billed to that seat.

class ReasoningDecider : public Decider {
 public:
  ReasoningDecider(std::shared_ptr<DecisionBackend> backend,
                   const PromptCatalog* catalog)
      : backend_(std::move(backend)),
        catalog_(catalog != nullptr ? catalog : &PromptCatalog::builtin()) {}

  DecisionBackend& backend() { return *backend_; }

 protected:
  Completion call(const PromptContext& prompt, Usage& usage);

  // Parses or falls back, flagging the fallback.
  Action parse_or_fallback(const DecisionContext& ctx, int perspective,
                           const std::string& text,
                           std::vector<std::string>& flags,
                           const std::string& flag_label) const;

  // One call on the named template, action parsed with fallback.
  DecisionResult single_decide(const DecisionContext& ctx,
                               const std::string& method);

  std::shared_ptr<DecisionBackend> backend_;
  const PromptCatalog* catalog_;
};

class DirectDecider final : public ReasoningDecider {
 public:
  using ReasoningDecider::ReasoningDecider;
  DecisionResult decide(const DecisionContext& ctx) override;
};

class CotDecider final : public ReasoningDecider {
 public:
  using ReasoningDecider::ReasoningDecider;
  DecisionResult decide(const DecisionContext& ctx) override;
};

class PersonaDecider final : public ReasoningDecider {
 public:
  using ReasoningDecider::ReasoningDecider;
  DecisionResult decide(const DecisionContext& ctx) override;
};

// Predicts opponents and decides inside one session (one completion).
class PcotDecider final : public ReasoningDecider {
 public:
  using ReasoningDecider::ReasoningDecider;
  DecisionResult decide(const DecisionContext& ctx) override;
};

// Direct decisions augmented with end-of-round lessons.
class ReflectDecider final : public ReasoningDecider {
 public:
  using ReasoningDecider::ReasoningDecider;
  DecisionResult decide(const DecisionContext& ctx) override;
  Usage on_round_end(const RoundFeedback& fb) override;

  const std::vector<std::string>& memory() const { return memory_; }

 private:
  std::vector<std::string> memory_;
};

// Draft, critique, revise: three calls per decision; draft kept as
// initial_action for the tuning-range statistic.
class RefineDecider final : public ReasoningDecider {
 public:
  using ReasoningDecider::ReasoningDecider;
  DecisionResult decide(const DecisionContext& ctx) override;
};

// Recursive K-Level Reasoning. Level 1 is exactly the Direct pipeline; at
// level m > 1 each other agent is simulated at m-1 in a fresh session, then
// one call decides given those predictions.
class KrDecider final : public ReasoningDecider {
 public:
  KrDecider(std::shared_ptr<DecisionBackend> backend, const PromptCatalog* catalog,
            int k, bool memoize = false, bool draft_then_revise = false)
      : ReasoningDecider(std::move(backend), catalog),
        k_(k),
        memoize_(memoize),
        draft_then_revise_(draft_then_revise) {
    if (k_ < 1) throw std::invalid_argument("KrDecider: k must be >= 1");
  }

  DecisionResult decide(const DecisionContext& ctx) override;

  int level() const { return k_; }

 private:
  struct Anticipation {
    int agent = 0;
    Action action;
    bool fallback = false;
  };

  Action reason_at(const DecisionContext& ctx, int perspective, int level,
                   std::vector<Anticipation>* top_level_out,
                   std::vector<std::string>& flags, Usage& usage,
                   std::map<std::string, Action>& memo, bool self_call);

  int k_;
  bool memoize_;
  bool draft_then_revise_;
};

// Prediction record written by predicting methods: a per-game scalar summary
// (mean predicted choice / max predicted bid) plus per-opponent details.
json summarize_predictions(GameKind game, const std::vector<std::pair<int, Action>>& predictions);

// One-line round summary used by the reflect update prompt.
std::string summarize_feedback(GameKind game, const RoundFeedback& fb);

std::shared_ptr<Decider> make_reasoning_decider(
    const std::string& method, std::shared_ptr<DecisionBackend> backend,
    const PromptCatalog* catalog, int k, const json& params = json::object());

bool is_reasoning_method(const std::string& method);
bool method_logs_predictions(const std::string& method);

}  // namespace klr
