#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "klr/core/rng.hpp"
#include "klr/core/types.hpp"

namespace klr {

struct SamplingParams {
  double temperature = 0.7;
  double top_p = 0.9;
};

json to_json(const SamplingParams& s);
SamplingParams sampling_from_json(const json& j);

// How one seat is driven: a reasoning method name ("direct", "kr", ...,
// or a programmatic strategy label like "LastBids (Fix)"), the backend it
// runs on, and the thinking level for "kr".
struct AgentSpec {
  std::string method = "direct";
  std::string backend = "scripted";
  int k = 2;
  bool player = false;
  json params = json::object();  // method-specific knobs
};

json to_json(const AgentSpec& a);
AgentSpec agent_spec_from_json(const json& j);

struct MatchConfig {
  GameKind game_kind = GameKind::G08A;
  int num_agents = 5;
  int max_rounds = 10;
  std::uint64_t seed = 0;
  std::vector<AgentSpec> agents;
  SamplingParams sampling;
  int decider_retries = 2;               // extra attempts after a failure
  json game_params = json::object();     // PD matrix, NEG pool, etc.

  void validate() const;
};

json to_json(const MatchConfig& c);
MatchConfig match_config_from_json(const json& j);

struct ActionRecord {
  int agent = 0;
  int round = 1;
  Action action;
  std::optional<json> prediction;        // predicting methods only
  std::optional<Action> initial_action;  // draft-then-revise methods only
  std::vector<std::string> flags;
  Usage usage;
};

json to_json(const ActionRecord& r);
ActionRecord action_record_from_json(GameKind kind, const json& j);

struct RoundLog {
  EnvSnapshot env;                    // pre-round snapshot all deciders saw
  std::vector<ActionRecord> actions;  // one per actor
  json result = json::object();       // engine-reported round outcome
  std::vector<Usage> round_end_usage; // per agent, e.g. reflection updates
};

struct MatchRecord {
  MatchConfig config;
  std::vector<RoundLog> rounds;
  json outcome = json::object();
  std::vector<Usage> usage;  // per agent, whole match
  bool valid = true;
  std::string abort_reason;

  Usage total_usage() const;
};

json to_json(const MatchRecord& r);
MatchRecord match_record_from_json(const json& j);

// Canonical serialization: nlohmann object keys are sorted, so dump() of the
// same record is byte-stable. The determinism contract compares these bytes.
std::string canonical_json(const MatchRecord& r);

// Per-game deterministic stand-in when a decider's output cannot be parsed.
Action fallback_action(GameKind kind, int agent, const PublicHistory& history,
                       int round);

class GameEngine {
 public:
  virtual ~GameEngine() = default;

  virtual GameKind kind() const = 0;
  virtual void reset(const MatchConfig& config) = 0;
  virtual int current_round() const = 0;

  // Pre-round public snapshot; must contain no private agent fields.
  virtual EnvSnapshot snapshot() const = 0;

  // Agents that must submit an action this round.
  virtual std::vector<int> actors() const = 0;

  // Private context for one agent (e.g. NEG utilities). Public games return {}.
  virtual json private_state(int /*agent*/) const { return json::object(); }

  // Clamp/convert an action to something legal, appending flags on change.
  virtual Action sanitize(int agent, const Action& action,
                          std::vector<std::string>& flags) const = 0;

  // Apply the joint action profile for the current round; returns the public
  // round result and advances to the next round.
  virtual json apply(const std::map<int, Action>& actions) = 0;

  virtual bool terminated() const = 0;
  virtual json outcome() const = 0;
};

std::unique_ptr<GameEngine> make_engine(GameKind kind);

struct DecisionContext {
  GameKind game = GameKind::G08A;
  int self = 0;
  int num_agents = 0;
  int round = 1;
  int max_rounds = 10;
  const EnvSnapshot* env = nullptr;
  const PublicHistory* history = nullptr;
  json private_state = json::object();
  std::uint64_t match_seed = 0;
  SamplingParams sampling;

  // Stream for this (agent, round, purpose) tuple.
  RngStream stream(std::uint64_t purpose = 0) const {
    return RngStream(derive_seed(match_seed, std::uint64_t(self),
                                 std::uint64_t(round), purpose));
  }
};

struct DecisionResult {
  Action action;
  std::optional<json> prediction;
  std::optional<Action> initial_action;
  std::vector<std::string> flags;
  Usage usage;
};

struct RoundFeedback {
  int self = 0;
  int round = 1;
  int max_rounds = 10;
  EnvSnapshot env_before;
  json result;
  Action own_action;
  const PublicHistory* history = nullptr;  // includes the finished round
  json private_state;
  SamplingParams sampling;
};

class Decider {
 public:
  virtual ~Decider() = default;
  virtual DecisionResult decide(const DecisionContext& ctx) = 0;
  // Post-round hook for methods that learn between rounds; returns any
  // token usage it consumed.
  virtual Usage on_round_end(const RoundFeedback& /*fb*/) { return {}; }
};

// Invoked after each completed round; lets callers stream long matches as
// they run instead of waiting for the full record.
using RoundSink = std::function<void(const RoundLog&)>;

MatchRecord run_match(const MatchConfig& config, GameEngine& engine,
                      const std::vector<std::shared_ptr<Decider>>& deciders,
                      const RoundSink& round_sink = {});

// Observer's view of a match in progress: current snapshot plus the public
// history. Throws on unknown observer.
std::pair<EnvSnapshot, PublicHistory> public_view(const GameEngine& engine,
                                                  const PublicHistory& history,
                                                  int observer);

// Replay closure: push the recorded actions back through a fresh engine and
// check every snapshot and round result matches the record.
bool verify_replay(const MatchRecord& record, std::string* first_mismatch = nullptr);

}  // namespace klr
