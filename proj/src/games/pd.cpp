#include "klr/games/pd.hpp"

#include <stdexcept>

namespace klr {

void PdMatrix::validate() const {
  if (!(temptation > reward && reward > punishment && punishment > sucker))
    throw std::invalid_argument("PD matrix requires T > R > P > S");
  if (!(2 * reward > temptation + sucker))
    throw std::invalid_argument("PD matrix requires 2R > T + S");
}

json to_json(const PdMatrix& m) {
  return json{{"T", m.temptation}, {"R", m.reward}, {"P", m.punishment},
              {"S", m.sucker}};
}

PdMatrix pd_matrix_from_json(const json& j) {
  PdMatrix m;
  m.temptation = j.value("T", 5);
  m.reward = j.value("R", 3);
  m.punishment = j.value("P", 1);
  m.sucker = j.value("S", 0);
  m.validate();
  return m;
}

std::pair<int, int> pd_payoff(PdAction a1, PdAction a2, const PdMatrix& m) {
  const bool c1 = a1 == PdAction::Cooperate;
  const bool c2 = a2 == PdAction::Cooperate;
  if (c1 && c2) return {m.reward, m.reward};
  if (c1 && !c2) return {m.sucker, m.temptation};
  if (!c1 && c2) return {m.temptation, m.sucker};
  return {m.punishment, m.punishment};
}

std::array<int, 4> PDState::outcome_counts() const {
  std::array<int, 4> counts{0, 0, 0, 0};
  for (const auto& [a1, a2] : joint_actions) {
    const int idx = (a1 == PdAction::Defect ? 2 : 0) +
                    (a2 == PdAction::Defect ? 1 : 0);
    counts[idx] += 1;
  }
  return counts;
}

void PDEngine::reset(const MatchConfig& config) {
  if (config.num_agents != 2)
    throw std::invalid_argument("PD: exactly two agents required");
  state_ = PDState{};
  if (config.game_params.contains("pd_matrix"))
    state_.matrix = pd_matrix_from_json(config.game_params.at("pd_matrix"));
  state_.matrix.validate();
}

EnvSnapshot PDEngine::snapshot() const {
  EnvSnapshot snap;
  snap.game_kind = GameKind::PD;
  snap.round = state_.round;
  json past = json::array();
  for (const auto& [a1, a2] : state_.joint_actions)
    past.push_back(json::array({to_string(a1), to_string(a2)}));
  snap.public_state = json{{"matrix", to_json(state_.matrix)},
                           {"past_actions", past},
                           {"payoffs", state_.payoffs}};
  return snap;
}

Action PDEngine::sanitize(int /*agent*/, const Action& action,
                          std::vector<std::string>& /*flags*/) const {
  if (!std::holds_alternative<PdAction>(action))
    throw std::invalid_argument("PD: non-PD action reached the engine");
  return action;
}

json PDEngine::apply(const std::map<int, Action>& actions) {
  const PdAction a1 = std::get<PdAction>(actions.at(0));
  const PdAction a2 = std::get<PdAction>(actions.at(1));
  const auto [p1, p2] = pd_payoff(a1, a2, state_.matrix);
  state_.joint_actions.emplace_back(a1, a2);
  state_.payoffs[0] += p1;
  state_.payoffs[1] += p2;
  state_.round += 1;
  return json{{"actions", json::array({to_string(a1), to_string(a2)})},
              {"payoffs", json::array({p1, p2})}};
}

json PDEngine::outcome() const {
  return json{{"payoffs", state_.payoffs},
              {"outcome_counts", state_.outcome_counts()},
              {"rounds_played", static_cast<int>(state_.joint_actions.size())}};
}

}  // namespace klr
