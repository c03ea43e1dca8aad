#pragma once

#include <optional>
#include <string>

#include "klr/core/match.hpp"
#include "klr/core/rng.hpp"
#include "klr/core/types.hpp"

namespace klr {

// Fixed behavioural patterns used as non-LLM opponents and as ground-truth
// hypotheses for the opponent model. Fix variants are deterministic given
// the public history; Var variants sample around the same anchors.

enum class StrategyKind {
  ZeroLevelFix,
  ZeroLevelVar,
  MonoTrendFix,
  MonoTrendVar,
  LastBidsFix,
  LastBidsVar,
};

struct StrategySpec {
  StrategyKind kind = StrategyKind::ZeroLevelFix;
  int start = 40;        // MonoTrend anchor
  int common_diff = 3;   // MonoTrend step; Var variants draw it per agent
  double spread = 2.2360679774997896;  // sigma; default reads "variance 5" literally

  std::string label() const;
};

// Canonical labels ("0-Level (Fix)", "LastBids (Var)", ...) plus snake_case
// aliases. variance_as_stddev switches the Var spread to sigma = 5.
std::optional<StrategySpec> strategy_spec_from_label(const std::string& label,
                                                     bool variance_as_stddev = false);

bool is_strategy_label(const std::string& label);

// Target of the last completed G0.8A round, recovered from the public
// history (0.8 x mean over everyone's round t-1 choices), rounded to an
// integer choice. Empty before round 2.
std::optional<int> previous_target_choice(const PublicHistory& history);

// Resolves the once-per-match randomness (the MonoTrend (Var) common
// difference) against the match seed so repeated calls agree.
StrategySpec resolve_strategy(const StrategySpec& spec, std::uint64_t match_seed,
                              int agent);

// Next G0.8A choice in [1,100]. `spec` must already be resolved; `rng` is the
// per-(agent, round) stream used by Var variants.
int next_choice(const StrategySpec& spec, const PublicHistory& history, int round,
                RngStream& rng);

// Decider adapter so programmatic opponents can sit in any seat of a match.
class StrategyDecider final : public Decider {
 public:
  explicit StrategyDecider(StrategySpec spec) : spec_(spec) {}
  DecisionResult decide(const DecisionContext& ctx) override;

 private:
  StrategySpec spec_;
};

}  // namespace klr
