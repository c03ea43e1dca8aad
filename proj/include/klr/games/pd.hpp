#pragma once

#include <map>
#include <vector>

#include "klr/core/match.hpp"
#include "klr/core/types.hpp"

namespace klr {

// Iterated Prisoner's Dilemma with a configurable payoff matrix
// (T, R, P, S) under the usual ordering constraints.

struct PdMatrix {
  int temptation = 5;
  int reward = 3;
  int punishment = 1;
  int sucker = 0;

  void validate() const;
};

json to_json(const PdMatrix& m);
PdMatrix pd_matrix_from_json(const json& j);

std::pair<int, int> pd_payoff(PdAction a1, PdAction a2, const PdMatrix& matrix);

struct PDState {
  int round = 1;
  PdMatrix matrix;
  std::vector<std::pair<PdAction, PdAction>> joint_actions;
  std::array<std::int64_t, 2> payoffs{0, 0};

  // Counts of (row agent 0, column agent 1) outcomes: [CC, CD, DC, DD].
  std::array<int, 4> outcome_counts() const;
};

class PDEngine final : public GameEngine {
 public:
  GameKind kind() const override { return GameKind::PD; }
  void reset(const MatchConfig& config) override;
  int current_round() const override { return state_.round; }
  EnvSnapshot snapshot() const override;
  std::vector<int> actors() const override { return {0, 1}; }
  Action sanitize(int agent, const Action& action,
                  std::vector<std::string>& flags) const override;
  json apply(const std::map<int, Action>& actions) override;
  bool terminated() const override { return false; }
  json outcome() const override;

  const PDState& state() const { return state_; }

 private:
  PDState state_;
};

}  // namespace klr
