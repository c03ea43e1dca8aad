#pragma once

#include <map>
#include <optional>
#include <vector>

#include "klr/core/match.hpp"
#include "klr/core/types.hpp"

namespace klr {

// Survival Auction Game: a daily sealed-bid auction for the water supply.
// Winner gains 2 health (capped), every non-winner loses health equal to
// its run of consecutive dry days; health <= 0 eliminates at day end.

struct SAGAgentState {
  int health = 8;
  std::int64_t balance = 0;
  int dry_streak = 0;
  bool alive = true;
  int eliminated_day = 0;  // 0 while alive
};

struct SAGAuction {
  std::vector<std::pair<int, std::int64_t>> bids;  // (agent, bid)
  std::optional<int> winner;                       // empty on tie
  std::int64_t price = 0;
};

struct SAGState {
  int day = 1;
  int max_health = 10;
  int start_health = 8;
  std::int64_t daily_income = 100;
  std::vector<SAGAgentState> agents;
  std::vector<SAGAuction> auctions;

  int alive_count() const {
    int n = 0;
    for (const auto& a : agents) n += a.alive ? 1 : 0;
    return n;
  }
};

struct SAGStepResult {
  std::optional<int> winner;
  std::int64_t price = 0;
  std::vector<int> eliminated;  // eliminated at this day's end
};

// Applies one full day given the bids of all alive agents. Income for the
// day must already be on the balances (the engine credits it when the day
// opens, so bids can spend it).
SAGStepResult sag_step(SAGState& state,
                       const std::vector<std::pair<int, std::int64_t>>& bids);

// Last day the agent was alive; agents still alive at match end score the
// configured round cap.
std::vector<int> sag_survival_rounds(const MatchRecord& record);

class SAGEngine final : public GameEngine {
 public:
  GameKind kind() const override { return GameKind::SAG; }
  void reset(const MatchConfig& config) override;
  int current_round() const override { return state_.day; }
  EnvSnapshot snapshot() const override;
  std::vector<int> actors() const override;
  Action sanitize(int agent, const Action& action,
                  std::vector<std::string>& flags) const override;
  json apply(const std::map<int, Action>& actions) override;
  bool terminated() const override;
  json outcome() const override;

  const SAGState& state() const { return state_; }

 private:
  void credit_income();

  SAGState state_;
  int max_rounds_ = 10;
};

}  // namespace klr
