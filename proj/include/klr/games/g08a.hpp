#pragma once

#include <map>
#include <vector>

#include "klr/core/match.hpp"
#include "klr/core/types.hpp"

namespace klr {

// Guessing 0.8 of the Average. Choices are integers in [1,100]; the round
// target is 0.8 x mean, kept as an exact fraction so closest-to-target
// comparisons never see float drift.

struct G08ARound {
  std::vector<std::pair<int, int>> choices;  // (agent, choice)
  Rational average;
  Rational target;
  std::vector<int> winners;
};

struct G08AState {
  int round = 1;
  int num_agents = 0;
  std::vector<G08ARound> past_rounds;
  std::vector<int> scores;  // cumulative, one point per round won
};

struct G08AStepResult {
  Rational average;
  Rational target;
  std::vector<int> winners;  // empty when all choices are equal
};

// Applies one simultaneous round. All listed agents are treated as active;
// choices must already be in [1,100].
G08AStepResult g08a_step(G08AState& state,
                         const std::vector<std::pair<int, int>>& choices);

// Exact squared-free distance used for the winner rule:
// |choice - 4*sum/(5*n)| compared via |5*n*choice - 4*sum|.
std::int64_t g08a_distance_numerator(int choice, std::int64_t sum, int n);

class G08AEngine final : public GameEngine {
 public:
  GameKind kind() const override { return GameKind::G08A; }
  void reset(const MatchConfig& config) override;
  int current_round() const override { return state_.round; }
  EnvSnapshot snapshot() const override;
  std::vector<int> actors() const override;
  Action sanitize(int agent, const Action& action,
                  std::vector<std::string>& flags) const override;
  json apply(const std::map<int, Action>& actions) override;
  bool terminated() const override { return false; }
  json outcome() const override;

  const G08AState& state() const { return state_; }

 private:
  G08AState state_;
};

}  // namespace klr
