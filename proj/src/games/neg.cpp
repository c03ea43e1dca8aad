#include "klr/games/neg.hpp"

#include <stdexcept>

namespace klr {

bool neg_allocation_valid(const NEGState& state, const NegAllocation& alloc) {
  for (int item = 0; item < 3; ++item) {
    const int a = alloc.counts[0][item];
    const int b = alloc.counts[1][item];
    if (a < 0 || b < 0) return false;
    if (a + b != state.pool[item]) return false;
  }
  return true;
}

void neg_step(NEGState& state, int agent, const NegMove& move) {
  if (state.status != NegStatus::Open)
    throw std::invalid_argument("neg_step: negotiation already closed");
  if (agent != state.turn_agent)
    throw std::invalid_argument("neg_step: not this agent's turn");

  json entry{{"agent", agent}, {"kind", to_string(move.kind)}};
  switch (move.kind) {
    case NegMove::Kind::Message:
      if (!move.text.empty()) entry["text"] = move.text;
      break;
    case NegMove::Kind::Propose: {
      if (!move.allocation || !neg_allocation_valid(state, *move.allocation))
        throw std::invalid_argument("neg_step: invalid proposal");
      state.pending = {agent, *move.allocation};
      json alloc = json::array();
      for (const auto& row : move.allocation->counts) alloc.push_back(row);
      entry["allocation"] = alloc;
      if (!move.text.empty()) entry["text"] = move.text;
      break;
    }
    case NegMove::Kind::Accept: {
      if (!state.pending || state.pending->first == agent)
        throw std::invalid_argument("neg_step: nothing to accept");
      state.agreed = state.pending->second;
      state.status = NegStatus::Agreed;
      break;
    }
    case NegMove::Kind::WalkAway:
      state.status = NegStatus::Failed;
      break;
  }

  state.dialogue.push_back(std::move(entry));
  state.move_count += 1;
  state.turn_agent = 1 - state.turn_agent;
}

NegScore neg_score(const NEGState& state) {
  NegScore score;
  if (state.status == NegStatus::Agreed && state.agreed) {
    for (int agent = 0; agent < 2; ++agent) {
      int u = 0;
      for (int item = 0; item < 3; ++item)
        u += state.agreed->counts[agent][item] * state.utilities[agent][item];
      score.utilities[agent] = u;
    }
    if (score.utilities[0] > score.utilities[1]) score.winner = 0;
    if (score.utilities[1] > score.utilities[0]) score.winner = 1;
  }
  return score;
}

void NEGEngine::reset(const MatchConfig& config) {
  if (config.num_agents != 2)
    throw std::invalid_argument("NEG: exactly two agents required");
  state_ = NEGState{};
  if (config.game_params.contains("pool")) {
    const auto& p = config.game_params.at("pool");
    for (int i = 0; i < 3; ++i) state_.pool[i] = p.at(i).get<int>();
  }
  state_.turn_agent = config.game_params.value("first_mover", 0);
  if (config.game_params.contains("utilities")) {
    const auto& u = config.game_params.at("utilities");
    for (int agent = 0; agent < 2; ++agent)
      for (int item = 0; item < 3; ++item)
        state_.utilities[agent][item] = u.at(agent).at(item).get<int>();
  } else {
    // Private per-item values drawn from the match seed.
    for (int agent = 0; agent < 2; ++agent) {
      RngStream stream(derive_seed(config.seed, 0x4e454755ULL, agent));
      for (int item = 0; item < 3; ++item)
        state_.utilities[agent][item] = static_cast<int>(stream.uniform_int(1, 10));
    }
  }
}

EnvSnapshot NEGEngine::snapshot() const {
  EnvSnapshot snap;
  snap.game_kind = GameKind::NEG;
  snap.round = state_.move_count + 1;
  json pending = nullptr;
  if (state_.pending) {
    json alloc = json::array();
    for (const auto& row : state_.pending->second.counts) alloc.push_back(row);
    pending = json{{"proposer", state_.pending->first}, {"allocation", alloc}};
  }
  const char* status = state_.status == NegStatus::Open     ? "open"
                       : state_.status == NegStatus::Agreed ? "agreed"
                                                            : "failed";
  snap.public_state = json{{"pool", state_.pool},
                           {"items", {kNegItems[0], kNegItems[1], kNegItems[2]}},
                           {"dialogue", state_.dialogue},
                           {"pending", pending},
                           {"status", status},
                           {"turn", state_.turn_agent}};
  return snap;
}

std::vector<int> NEGEngine::actors() const { return {state_.turn_agent}; }

json NEGEngine::private_state(int agent) const {
  return json{{"utilities", state_.utilities.at(agent)}};
}

Action NEGEngine::sanitize(int agent, const Action& action,
                           std::vector<std::string>& flags) const {
  if (!std::holds_alternative<NegMove>(action))
    throw std::invalid_argument("NEG: non-negotiation action reached the engine");
  NegMove move = std::get<NegMove>(action);
  if (move.kind == NegMove::Kind::Propose &&
      (!move.allocation || !neg_allocation_valid(state_, *move.allocation))) {
    move.kind = NegMove::Kind::Message;
    move.allocation.reset();
    flags.push_back("invalid_proposal_as_message");
  }
  if (move.kind == NegMove::Kind::Accept &&
      (!state_.pending || state_.pending->first == agent)) {
    move.kind = NegMove::Kind::Message;
    flags.push_back("invalid_accept_as_message");
  }
  return move;
}

json NEGEngine::apply(const std::map<int, Action>& actions) {
  if (actions.size() != 1)
    throw std::invalid_argument("NEG: exactly one agent moves per turn");
  const auto& [agent, action] = *actions.begin();
  neg_step(state_, agent, std::get<NegMove>(action));
  const char* status = state_.status == NegStatus::Open     ? "open"
                       : state_.status == NegStatus::Agreed ? "agreed"
                                                            : "failed";
  return json{{"move", state_.dialogue.back()}, {"status", status}};
}

json NEGEngine::outcome() const {
  // An open negotiation at the round cap counts as failed.
  NEGState final_state = state_;
  if (final_state.status == NegStatus::Open)
    final_state.status = NegStatus::Failed;
  const NegScore score = neg_score(final_state);
  json j{{"status", final_state.status == NegStatus::Agreed ? "agreed" : "failed"},
         {"utilities", score.utilities},
         {"moves", state_.move_count}};
  if (score.winner) j["winner"] = *score.winner;
  if (state_.agreed) {
    json alloc = json::array();
    for (const auto& row : state_.agreed->counts) alloc.push_back(row);
    j["allocation"] = alloc;
  }
  return j;
}

}  // namespace klr
