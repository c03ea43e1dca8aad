#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "klr/core/match.hpp"
#include "klr/core/types.hpp"

namespace klr {

// Two-agent negotiation over a public pool of peppers, cherries and
// strawberries. Utilities are private; the engine only gives mechanics to
// propose/accept/walk_away, free-text messages are opaque.

inline constexpr std::array<const char*, 3> kNegItems = {"peppers", "cherries",
                                                         "strawberries"};

enum class NegStatus { Open, Agreed, Failed };

struct NEGState {
  std::array<int, 3> pool{2, 2, 2};
  std::array<std::array<int, 3>, 2> utilities{};  // private per agent
  int turn_agent = 0;
  int move_count = 0;
  NegStatus status = NegStatus::Open;
  std::optional<std::pair<int, NegAllocation>> pending;  // (proposer, split)
  std::optional<NegAllocation> agreed;
  std::vector<json> dialogue;  // public move log
};

struct NegScore {
  std::optional<int> winner;
  std::array<int, 2> utilities{0, 0};
};

// True iff the allocation hands out exactly the pool, nothing more or less.
bool neg_allocation_valid(const NEGState& state, const NegAllocation& alloc);

// Applies one move by the agent whose turn it is. The move must already be
// sanitized (invalid accepts/proposals are downgraded to messages upstream).
void neg_step(NEGState& state, int agent, const NegMove& move);

// Utilities scored against the agreed allocation; failed or open-at-cap
// negotiations score zero for both and have no winner.
NegScore neg_score(const NEGState& state);

class NEGEngine final : public GameEngine {
 public:
  GameKind kind() const override { return GameKind::NEG; }
  void reset(const MatchConfig& config) override;
  int current_round() const override { return state_.move_count + 1; }
  EnvSnapshot snapshot() const override;
  std::vector<int> actors() const override;
  json private_state(int agent) const override;
  Action sanitize(int agent, const Action& action,
                  std::vector<std::string>& flags) const override;
  json apply(const std::map<int, Action>& actions) override;
  bool terminated() const override { return state_.status != NegStatus::Open; }
  json outcome() const override;

  const NEGState& state() const { return state_; }

 private:
  NEGState state_;
};

}  // namespace klr
