#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace klr {

using json = nlohmann::json;

enum class GameKind { G08A, SAG, NEG, PD };

std::string to_string(GameKind kind);
GameKind game_kind_from_string(const std::string& name);

struct AgentId {
  int index = 0;
  std::string label;

  bool operator==(const AgentId& other) const { return index == other.index; }
};

// Exact fraction for G0.8A averages/targets; winner comparisons must not
// go through floating point.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return double(num) / double(den); }
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

json to_json(const Rational& r);
Rational rational_from_json(const json& j);

enum class PdAction { Cooperate, Defect };

std::string to_string(PdAction a);
PdAction pd_action_from_string(const std::string& s);

// Allocation of the three-item NEG pool between the two negotiating agents:
// counts[agent][item].
struct NegAllocation {
  std::array<std::array<int, 3>, 2> counts{{{0, 0, 0}, {0, 0, 0}}};

  bool operator==(const NegAllocation& o) const { return counts == o.counts; }
};

struct NegMove {
  enum class Kind { Message, Propose, Accept, WalkAway };
  Kind kind = Kind::Message;
  std::string text;
  std::optional<NegAllocation> allocation;  // Propose only
};

std::string to_string(NegMove::Kind k);
NegMove::Kind neg_move_kind_from_string(const std::string& s);

// One action value. G0.8A choices and SAG bids are plain integers.
using Action = std::variant<int, NegMove, PdAction>;

json action_to_json(const Action& a);
Action action_from_json(GameKind kind, const json& j);

// Publicly observable environment at the start of a round. public_state is a
// game-specific document and must never contain any agent's private fields.
struct EnvSnapshot {
  GameKind game_kind = GameKind::G08A;
  int round = 1;
  json public_state = json::object();
};

json to_json(const EnvSnapshot& snap);
EnvSnapshot env_snapshot_from_json(const json& j);

struct HistoryEntry {
  EnvSnapshot env;
  Action action;
};

// H_j per agent: the (pre-round snapshot, action) pairs of completed rounds.
struct PublicHistory {
  std::vector<std::vector<HistoryEntry>> per_agent;

  int num_agents() const { return static_cast<int>(per_agent.size()); }
  std::size_t rounds_completed() const {
    return per_agent.empty() ? 0 : per_agent.front().size();
  }
};

struct Usage {
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  std::int64_t call_count = 0;

  std::int64_t total() const { return input_tokens + output_tokens; }

  Usage& operator+=(const Usage& o) {
    input_tokens += o.input_tokens;
    output_tokens += o.output_tokens;
    call_count += o.call_count;
    return *this;
  }
};

json to_json(const Usage& u);
Usage usage_from_json(const json& j);

}  // namespace klr
