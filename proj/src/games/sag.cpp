#include "klr/games/sag.hpp"

#include <algorithm>
#include <stdexcept>

namespace klr {

SAGStepResult sag_step(SAGState& state,
                       const std::vector<std::pair<int, std::int64_t>>& bids) {
  SAGStepResult result;
  if (bids.empty()) throw std::invalid_argument("sag_step: no bids");
  for (const auto& [agent, bid] : bids) {
    const auto& a = state.agents.at(agent);
    if (!a.alive) throw std::invalid_argument("sag_step: bid from eliminated agent");
    if (bid < 0 || bid > a.balance)
      throw std::invalid_argument("sag_step: bid outside [0, balance]");
  }

  std::int64_t highest = -1;
  int highest_count = 0;
  int highest_agent = -1;
  for (const auto& [agent, bid] : bids) {
    if (bid > highest) {
      highest = bid;
      highest_count = 1;
      highest_agent = agent;
    } else if (bid == highest) {
      highest_count += 1;
    }
  }
  const bool has_winner = highest_count == 1;

  SAGAuction auction;
  auction.bids = bids;
  if (has_winner) {
    auction.winner = highest_agent;
    auction.price = highest;
    result.winner = highest_agent;
    result.price = highest;
  }
  state.auctions.push_back(auction);

  for (const auto& [agent, bid] : bids) {
    auto& a = state.agents[agent];
    if (has_winner && agent == highest_agent) {
      a.balance -= highest;
      a.health = std::min(a.health + 2, state.max_health);
      a.dry_streak = 0;
    } else {
      a.dry_streak += 1;
      a.health -= a.dry_streak;
    }
  }

  // Eliminations happen at day end, after all health changes.
  for (const auto& [agent, bid] : bids) {
    auto& a = state.agents[agent];
    if (a.alive && a.health <= 0) {
      a.alive = false;
      a.eliminated_day = state.day;
      result.eliminated.push_back(agent);
    }
  }

  state.day += 1;
  return result;
}

std::vector<int> sag_survival_rounds(const MatchRecord& record) {
  if (!record.outcome.contains("survival_rounds"))
    throw std::invalid_argument("sag_survival_rounds: not a completed SAG record");
  return record.outcome.at("survival_rounds").get<std::vector<int>>();
}

void SAGEngine::reset(const MatchConfig& config) {
  state_ = SAGState{};
  max_rounds_ = config.max_rounds;
  state_.max_health = config.game_params.value("max_health", 10);
  state_.start_health = config.game_params.value("start_health", 8);
  state_.daily_income = config.game_params.value("daily_income", 100);
  SAGAgentState init;
  init.health = state_.start_health;
  state_.agents.assign(config.num_agents, init);
  credit_income();
}

void SAGEngine::credit_income() {
  for (auto& a : state_.agents)
    if (a.alive) a.balance += state_.daily_income;
}

EnvSnapshot SAGEngine::snapshot() const {
  EnvSnapshot snap;
  snap.game_kind = GameKind::SAG;
  snap.round = state_.day;
  json agents = json::array();
  for (const auto& a : state_.agents)
    agents.push_back(json{{"health", a.health},
                          {"balance", a.balance},
                          {"dry_streak", a.dry_streak},
                          {"alive", a.alive}});
  json auctions = json::array();
  for (const auto& au : state_.auctions) {
    json bids = json::array();
    for (const auto& [agent, bid] : au.bids)
      bids.push_back(json{{"agent", agent}, {"bid", bid}});
    json j{{"bids", bids}, {"price", au.price}};
    if (au.winner) j["winner"] = *au.winner;
    auctions.push_back(j);
  }
  snap.public_state = json{{"agents", agents},
                           {"past_auctions", auctions},
                           {"daily_income", state_.daily_income},
                           {"max_health", state_.max_health}};
  return snap;
}

std::vector<int> SAGEngine::actors() const {
  std::vector<int> alive;
  for (int i = 0; i < static_cast<int>(state_.agents.size()); ++i)
    if (state_.agents[i].alive) alive.push_back(i);
  return alive;
}

Action SAGEngine::sanitize(int agent, const Action& action,
                           std::vector<std::string>& flags) const {
  if (!std::holds_alternative<int>(action))
    throw std::invalid_argument("SAG: non-numeric action reached the engine");
  std::int64_t bid = std::get<int>(action);
  const auto& a = state_.agents.at(agent);
  if (bid < 0) {
    bid = 0;
    flags.push_back("clamped");
  }
  if (bid > a.balance) {
    bid = a.balance;
    flags.push_back("clamped");
  }
  return static_cast<int>(bid);
}

json SAGEngine::apply(const std::map<int, Action>& actions) {
  std::vector<std::pair<int, std::int64_t>> bids;
  bids.reserve(actions.size());
  for (const auto& [agent, action] : actions)
    bids.emplace_back(agent, std::get<int>(action));
  const SAGStepResult r = sag_step(state_, bids);

  json j{{"price", r.price}, {"eliminated", r.eliminated}};
  if (r.winner) j["winner"] = *r.winner;
  json health = json::array();
  for (const auto& a : state_.agents) health.push_back(a.health);
  j["health_after"] = health;

  if (!terminated()) credit_income();
  return j;
}

bool SAGEngine::terminated() const {
  return state_.alive_count() <= 1 || state_.day > max_rounds_;
}

json SAGEngine::outcome() const {
  std::vector<int> survival;
  json agents = json::array();
  for (const auto& a : state_.agents) {
    survival.push_back(a.alive ? max_rounds_ : a.eliminated_day);
    agents.push_back(json{{"health", a.health},
                          {"balance", a.balance},
                          {"alive", a.alive},
                          {"eliminated_day", a.eliminated_day}});
  }
  return json{{"survival_rounds", survival},
              {"agents", agents},
              {"days_played", static_cast<int>(state_.auctions.size())}};
}

}  // namespace klr
