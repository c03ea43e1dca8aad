#include "klr/core/types.hpp"

namespace klr {

std::string to_string(GameKind kind) {
  switch (kind) {
    case GameKind::G08A: return "g08a";
    case GameKind::SAG: return "sag";
    case GameKind::NEG: return "neg";
    case GameKind::PD: return "pd";
  }
  throw std::logic_error("unknown GameKind");
}

GameKind game_kind_from_string(const std::string& name) {
  if (name == "g08a" || name == "G08A" || name == "G0.8A") return GameKind::G08A;
  if (name == "sag" || name == "SAG") return GameKind::SAG;
  if (name == "neg" || name == "NEG") return GameKind::NEG;
  if (name == "pd" || name == "PD") return GameKind::PD;
  throw std::invalid_argument("unknown game kind: " + name);
}

json to_json(const Rational& r) { return json{{"num", r.num}, {"den", r.den}}; }

Rational rational_from_json(const json& j) {
  return Rational(j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>());
}

std::string to_string(PdAction a) {
  return a == PdAction::Cooperate ? "C" : "D";
}

PdAction pd_action_from_string(const std::string& s) {
  if (s == "C" || s == "c" || s == "Cooperate" || s == "cooperate")
    return PdAction::Cooperate;
  if (s == "D" || s == "d" || s == "Defect" || s == "defect")
    return PdAction::Defect;
  throw std::invalid_argument("unknown PD action: " + s);
}

std::string to_string(NegMove::Kind k) {
  switch (k) {
    case NegMove::Kind::Message: return "message";
    case NegMove::Kind::Propose: return "propose";
    case NegMove::Kind::Accept: return "accept";
    case NegMove::Kind::WalkAway: return "walk_away";
  }
  throw std::logic_error("unknown NegMove::Kind");
}

NegMove::Kind neg_move_kind_from_string(const std::string& s) {
  if (s == "message") return NegMove::Kind::Message;
  if (s == "propose") return NegMove::Kind::Propose;
  if (s == "accept") return NegMove::Kind::Accept;
  if (s == "walk_away") return NegMove::Kind::WalkAway;
  throw std::invalid_argument("unknown NEG move kind: " + s);
}

json action_to_json(const Action& a) {
  json j;
  if (std::holds_alternative<int>(a)) {
    j["type"] = "int";
    j["value"] = std::get<int>(a);
  } else if (std::holds_alternative<PdAction>(a)) {
    j["type"] = "pd";
    j["value"] = to_string(std::get<PdAction>(a));
  } else {
    const auto& m = std::get<NegMove>(a);
    j["type"] = "neg";
    j["kind"] = to_string(m.kind);
    if (!m.text.empty()) j["text"] = m.text;
    if (m.allocation) {
      j["allocation"] = json::array();
      for (const auto& row : m.allocation->counts) j["allocation"].push_back(row);
    }
  }
  return j;
}

Action action_from_json(GameKind kind, const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "int") return j.at("value").get<int>();
  if (type == "pd") return pd_action_from_string(j.at("value").get<std::string>());
  if (type == "neg") {
    NegMove m;
    m.kind = neg_move_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("text")) m.text = j.at("text").get<std::string>();
    if (j.contains("allocation")) {
      NegAllocation a;
      for (int agent = 0; agent < 2; ++agent)
        for (int item = 0; item < 3; ++item)
          a.counts[agent][item] = j.at("allocation").at(agent).at(item).get<int>();
      m.allocation = a;
    }
    return m;
  }
  throw std::invalid_argument("action_from_json: bad type for game " +
                              to_string(kind));
}

json to_json(const EnvSnapshot& snap) {
  return json{{"game", to_string(snap.game_kind)},
              {"round", snap.round},
              {"public_state", snap.public_state}};
}

EnvSnapshot env_snapshot_from_json(const json& j) {
  EnvSnapshot s;
  s.game_kind = game_kind_from_string(j.at("game").get<std::string>());
  s.round = j.at("round").get<int>();
  s.public_state = j.at("public_state");
  return s;
}

json to_json(const Usage& u) {
  return json{{"input_tokens", u.input_tokens},
              {"output_tokens", u.output_tokens},
              {"total_tokens", u.total()},
              {"call_count", u.call_count}};
}

Usage usage_from_json(const json& j) {
  Usage u;
  u.input_tokens = j.at("input_tokens").get<std::int64_t>();
  u.output_tokens = j.at("output_tokens").get<std::int64_t>();
  u.call_count = j.at("call_count").get<std::int64_t>();
  return u;
}

}  // namespace klr
