#include "klr/games/g08a.hpp"

#include <algorithm>
#include <stdexcept>

namespace klr {

std::int64_t g08a_distance_numerator(int choice, std::int64_t sum, int n) {
  const std::int64_t d = 5LL * n * choice - 4LL * sum;
  return d < 0 ? -d : d;
}

G08AStepResult g08a_step(G08AState& state,
                         const std::vector<std::pair<int, int>>& choices) {
  if (choices.empty()) throw std::invalid_argument("g08a_step: no choices");
  std::int64_t sum = 0;
  for (const auto& [agent, choice] : choices) {
    (void)agent;
    if (choice < 1 || choice > 100)
      throw std::invalid_argument("g08a_step: choice out of [1,100]");
    sum += choice;
  }
  const int n = static_cast<int>(choices.size());

  G08AStepResult result;
  result.average = Rational(sum, n);
  result.target = Rational(4 * sum, 5LL * n);

  const bool all_equal = std::all_of(
      choices.begin(), choices.end(),
      [&](const auto& c) { return c.second == choices.front().second; });
  if (!all_equal) {
    std::int64_t best = -1;
    for (const auto& [agent, choice] : choices) {
      const std::int64_t d = g08a_distance_numerator(choice, sum, n);
      if (best < 0 || d < best) best = d;
    }
    for (const auto& [agent, choice] : choices)
      if (g08a_distance_numerator(choice, sum, n) == best)
        result.winners.push_back(agent);
  }

  G08ARound past;
  past.choices = choices;
  past.average = result.average;
  past.target = result.target;
  past.winners = result.winners;
  state.past_rounds.push_back(std::move(past));
  for (int w : result.winners) state.scores.at(w) += 1;
  state.round += 1;
  return result;
}

void G08AEngine::reset(const MatchConfig& config) {
  state_ = G08AState{};
  state_.num_agents = config.num_agents;
  state_.scores.assign(config.num_agents, 0);
}

EnvSnapshot G08AEngine::snapshot() const {
  EnvSnapshot snap;
  snap.game_kind = GameKind::G08A;
  snap.round = state_.round;
  json past = json::array();
  for (const auto& r : state_.past_rounds) {
    json choices = json::array();
    for (const auto& [agent, choice] : r.choices)
      choices.push_back(json{{"agent", agent}, {"choice", choice}});
    past.push_back(json{{"choices", choices},
                        {"average", to_json(r.average)},
                        {"average_value", r.average.value()},
                        {"target", to_json(r.target)},
                        {"target_value", r.target.value()},
                        {"winners", r.winners}});
  }
  snap.public_state = json{{"past_rounds", past}, {"scores", state_.scores}};
  return snap;
}

std::vector<int> G08AEngine::actors() const {
  std::vector<int> all(state_.num_agents);
  for (int i = 0; i < state_.num_agents; ++i) all[i] = i;
  return all;
}

Action G08AEngine::sanitize(int /*agent*/, const Action& action,
                            std::vector<std::string>& flags) const {
  if (!std::holds_alternative<int>(action))
    throw std::invalid_argument("G08A: non-numeric action reached the engine");
  int v = std::get<int>(action);
  if (v < 1 || v > 100) {
    v = std::clamp(v, 1, 100);
    flags.push_back("clamped");
  }
  return v;
}

json G08AEngine::apply(const std::map<int, Action>& actions) {
  std::vector<std::pair<int, int>> choices;
  choices.reserve(actions.size());
  for (const auto& [agent, action] : actions)
    choices.emplace_back(agent, std::get<int>(action));
  const G08AStepResult r = g08a_step(state_, choices);
  return json{{"average", to_json(r.average)},
              {"average_value", r.average.value()},
              {"target", to_json(r.target)},
              {"target_value", r.target.value()},
              {"winners", r.winners}};
}

json G08AEngine::outcome() const {
  return json{{"scores", state_.scores},
              {"rounds_played", static_cast<int>(state_.past_rounds.size())}};
}

}  // namespace klr
