#include "klr/core/match.hpp"

#include <stdexcept>

namespace klr {

json to_json(const SamplingParams& s) {
  return json{{"temperature", s.temperature}, {"top_p", s.top_p}};
}

SamplingParams sampling_from_json(const json& j) {
  SamplingParams s;
  s.temperature = j.value("temperature", 0.7);
  s.top_p = j.value("top_p", 0.9);
  return s;
}

json to_json(const AgentSpec& a) {
  json j{{"method", a.method}, {"backend", a.backend}, {"k", a.k},
         {"player", a.player}};
  if (!a.params.empty()) j["params"] = a.params;
  return j;
}

AgentSpec agent_spec_from_json(const json& j) {
  AgentSpec a;
  a.method = j.value("method", "direct");
  a.backend = j.value("backend", "scripted");
  a.k = j.value("k", 2);
  a.player = j.value("player", false);
  a.params = j.value("params", json::object());
  return a;
}

void MatchConfig::validate() const {
  if (num_agents < 2) throw std::invalid_argument("MatchConfig: num_agents must be >= 2");
  if (max_rounds < 1) throw std::invalid_argument("MatchConfig: max_rounds must be >= 1");
  if (!agents.empty() && static_cast<int>(agents.size()) != num_agents)
    throw std::invalid_argument("MatchConfig: agents size mismatch");
  int players = 0;
  for (const auto& a : agents) players += a.player ? 1 : 0;
  if (players > 1)
    throw std::invalid_argument("MatchConfig: at most one agent may be the player");
}

json to_json(const MatchConfig& c) {
  json agents = json::array();
  for (const auto& a : c.agents) agents.push_back(to_json(a));
  return json{{"game", to_string(c.game_kind)},
              {"num_agents", c.num_agents},
              {"max_rounds", c.max_rounds},
              {"seed", c.seed},
              {"agents", agents},
              {"sampling", to_json(c.sampling)},
              {"decider_retries", c.decider_retries},
              {"game_params", c.game_params}};
}

MatchConfig match_config_from_json(const json& j) {
  MatchConfig c;
  c.game_kind = game_kind_from_string(j.at("game").get<std::string>());
  c.num_agents = j.at("num_agents").get<int>();
  c.max_rounds = j.at("max_rounds").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& a : j.value("agents", json::array()))
    c.agents.push_back(agent_spec_from_json(a));
  if (j.contains("sampling")) c.sampling = sampling_from_json(j.at("sampling"));
  c.decider_retries = j.value("decider_retries", 2);
  c.game_params = j.value("game_params", json::object());
  return c;
}

json to_json(const ActionRecord& r) {
  json j{{"agent", r.agent},
         {"round", r.round},
         {"action", action_to_json(r.action)},
         {"usage", to_json(r.usage)}};
  if (r.prediction) j["prediction"] = *r.prediction;
  if (r.initial_action) j["initial_action"] = action_to_json(*r.initial_action);
  if (!r.flags.empty()) j["flags"] = r.flags;
  return j;
}

ActionRecord action_record_from_json(GameKind kind, const json& j) {
  ActionRecord r;
  r.agent = j.at("agent").get<int>();
  r.round = j.at("round").get<int>();
  r.action = action_from_json(kind, j.at("action"));
  r.usage = usage_from_json(j.at("usage"));
  if (j.contains("prediction")) r.prediction = j.at("prediction");
  if (j.contains("initial_action"))
    r.initial_action = action_from_json(kind, j.at("initial_action"));
  if (j.contains("flags"))
    r.flags = j.at("flags").get<std::vector<std::string>>();
  return r;
}

Usage MatchRecord::total_usage() const {
  Usage t;
  for (const auto& u : usage) t += u;
  return t;
}

json to_json(const MatchRecord& r) {
  json rounds = json::array();
  for (const auto& rd : r.rounds) {
    json actions = json::array();
    for (const auto& a : rd.actions) actions.push_back(to_json(a));
    json end_usage = json::array();
    for (const auto& u : rd.round_end_usage) end_usage.push_back(to_json(u));
    rounds.push_back(json{{"env", to_json(rd.env)},
                          {"actions", actions},
                          {"result", rd.result},
                          {"round_end_usage", end_usage}});
  }
  json usage = json::array();
  for (const auto& u : r.usage) usage.push_back(to_json(u));
  json j{{"config", to_json(r.config)},
         {"rounds", rounds},
         {"outcome", r.outcome},
         {"usage", usage},
         {"valid", r.valid}};
  if (!r.abort_reason.empty()) j["abort_reason"] = r.abort_reason;
  return j;
}

MatchRecord match_record_from_json(const json& j) {
  MatchRecord r;
  r.config = match_config_from_json(j.at("config"));
  for (const auto& rd : j.at("rounds")) {
    RoundLog log;
    log.env = env_snapshot_from_json(rd.at("env"));
    for (const auto& a : rd.at("actions"))
      log.actions.push_back(action_record_from_json(r.config.game_kind, a));
    log.result = rd.at("result");
    for (const auto& u : rd.at("round_end_usage"))
      log.round_end_usage.push_back(usage_from_json(u));
    r.rounds.push_back(std::move(log));
  }
  r.outcome = j.at("outcome");
  for (const auto& u : j.at("usage")) r.usage.push_back(usage_from_json(u));
  r.valid = j.at("valid").get<bool>();
  r.abort_reason = j.value("abort_reason", "");
  return r;
}

std::string canonical_json(const MatchRecord& r) { return to_json(r).dump(); }

Action fallback_action(GameKind kind, int agent, const PublicHistory& history,
                       int round) {
  switch (kind) {
    case GameKind::G08A: {
      // Repeat the agent's previous choice; 50 when there is none.
      if (round > 1 && agent < history.num_agents()) {
        const auto& entries = history.per_agent[agent];
        for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
          if (std::holds_alternative<int>(it->action))
            return std::get<int>(it->action);
        }
      }
      return 50;
    }
    case GameKind::SAG:
      return 0;
    case GameKind::NEG: {
      NegMove m;
      m.kind = NegMove::Kind::Message;
      m.text = "(no-op)";
      return m;
    }
    case GameKind::PD:
      return PdAction::Cooperate;
  }
  throw std::logic_error("fallback_action: unknown game");
}

MatchRecord run_match(const MatchConfig& config, GameEngine& engine,
                      const std::vector<std::shared_ptr<Decider>>& deciders,
                      const RoundSink& round_sink) {
  config.validate();
  if (static_cast<int>(deciders.size()) != config.num_agents)
    throw std::invalid_argument("run_match: decider count != num_agents");
  if (engine.kind() != config.game_kind)
    throw std::invalid_argument("run_match: engine game kind mismatch");

  engine.reset(config);

  MatchRecord record;
  record.config = config;
  record.usage.assign(config.num_agents, Usage{});

  PublicHistory history;
  history.per_agent.assign(config.num_agents, {});

  for (int round = 1; round <= config.max_rounds; ++round) {
    if (engine.terminated()) break;

    const EnvSnapshot snap = engine.snapshot();
    const std::vector<int> actors = engine.actors();

    RoundLog log;
    log.env = snap;
    log.round_end_usage.assign(config.num_agents, Usage{});

    // Simultaneous moves: every decider sees the same pre-round snapshot and
    // a history that stops at round-1.
    std::map<int, Action> joint;
    for (int agent : actors) {
      DecisionContext ctx;
      ctx.game = config.game_kind;
      ctx.self = agent;
      ctx.num_agents = config.num_agents;
      ctx.round = round;
      ctx.max_rounds = config.max_rounds;
      ctx.env = &snap;
      ctx.history = &history;
      ctx.private_state = engine.private_state(agent);
      ctx.match_seed = config.seed;
      ctx.sampling = config.sampling;

      DecisionResult result;
      bool decided = false;
      std::string last_error;
      for (int attempt = 0; attempt <= config.decider_retries && !decided; ++attempt) {
        try {
          result = deciders[agent]->decide(ctx);
          decided = true;
        } catch (const std::exception& e) {
          last_error = e.what();
        }
      }
      if (!decided) {
        record.valid = false;
        record.abort_reason = "decider failure (agent " + std::to_string(agent) +
                              ", round " + std::to_string(round) + "): " + last_error;
        record.rounds.push_back(std::move(log));
        record.outcome = json{{"aborted", true}};
        return record;
      }

      ActionRecord ar;
      ar.agent = agent;
      ar.round = round;
      ar.flags = result.flags;
      ar.action = engine.sanitize(agent, result.action, ar.flags);
      ar.prediction = result.prediction;
      ar.initial_action = result.initial_action;
      ar.usage = result.usage;
      record.usage[agent] += result.usage;

      joint[agent] = ar.action;
      log.actions.push_back(std::move(ar));
    }

    log.result = engine.apply(joint);

    for (int agent : actors)
      history.per_agent[agent].push_back(HistoryEntry{snap, joint.at(agent)});

    for (int agent : actors) {
      RoundFeedback fb;
      fb.self = agent;
      fb.round = round;
      fb.max_rounds = config.max_rounds;
      fb.env_before = snap;
      fb.result = log.result;
      fb.own_action = joint.at(agent);
      fb.history = &history;
      fb.private_state = engine.private_state(agent);
      fb.sampling = config.sampling;
      const Usage u = deciders[agent]->on_round_end(fb);
      log.round_end_usage[agent] = u;
      record.usage[agent] += u;
    }

    if (round_sink) round_sink(log);
    record.rounds.push_back(std::move(log));
  }

  record.outcome = engine.outcome();
  return record;
}

std::pair<EnvSnapshot, PublicHistory> public_view(const GameEngine& engine,
                                                  const PublicHistory& history,
                                                  int observer) {
  if (observer < 0 || observer >= history.num_agents())
    throw std::out_of_range("public_view: unknown observer " +
                            std::to_string(observer));
  return {engine.snapshot(), history};
}

bool verify_replay(const MatchRecord& record, std::string* first_mismatch) {
  auto fail = [&](const std::string& why) {
    if (first_mismatch) *first_mismatch = why;
    return false;
  };
  auto engine = make_engine(record.config.game_kind);
  engine->reset(record.config);
  for (std::size_t i = 0; i < record.rounds.size(); ++i) {
    const auto& rd = record.rounds[i];
    if (engine->terminated())
      return fail("engine terminated before recorded round " + std::to_string(i + 1));
    const EnvSnapshot snap = engine->snapshot();
    if (to_json(snap) != to_json(rd.env))
      return fail("snapshot mismatch at round " + std::to_string(i + 1));
    std::map<int, Action> joint;
    for (const auto& a : rd.actions) joint[a.agent] = a.action;
    const json result = engine->apply(joint);
    if (result != rd.result)
      return fail("result mismatch at round " + std::to_string(i + 1));
  }
  if (record.valid && engine->outcome() != record.outcome)
    return fail("outcome mismatch");
  return true;
}

}  // namespace klr
