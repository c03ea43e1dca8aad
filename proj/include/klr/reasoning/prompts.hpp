#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "klr/core/match.hpp"
#include "klr/gateway/backend.hpp"

namespace klr {

// Template catalog: one template per (game, method, step). Templates are
// data; the builtin set can be overridden from a directory of
// <game>_<method>_<step>.txt files with [SYSTEM]/[USER] section markers.
class PromptCatalog {
 public:
  static const PromptCatalog& builtin();

  PromptCatalog() = default;

  void set(GameKind game, const std::string& method, const std::string& step,
           const std::string& text);
  const std::string& get(GameKind game, const std::string& method,
                         const std::string& step) const;
  bool has(GameKind game, const std::string& method, const std::string& step) const;

  void load_overrides(const std::string& dir);
  void dump(const std::string& dir) const;

  const std::map<std::string, std::string>& all() const { return templates_; }

  static std::string key(GameKind game, const std::string& method,
                         const std::string& step);

 private:
  std::map<std::string, std::string> templates_;
};

// The fragments a template can splice in.
struct PromptInputs {
  const DecisionContext* ctx = nullptr;
  int perspective = 0;       // whose shoes the prompt is written in
  json anticipated = json::array();  // [{agent, action}] for m > 1 steps
  std::string memory;        // reflection lessons
  std::string draft;         // refine pipeline
  std::string critique;
  std::string result;        // finished-round summary for reflect updates
  bool include_private = false;  // only the player's own top-level calls
};

// Renders one backend request. `player` is the billing seat.
PromptContext build_prompt(const PromptCatalog& catalog, GameKind game,
                           const std::string& method, const std::string& step,
                           int player, const PromptInputs& inputs);

// Public-state rendering used inside {env}; exposed for tests.
std::string render_env(GameKind game, const EnvSnapshot& env, int perspective,
                       int num_agents);
std::string render_own_history(GameKind game, const PublicHistory& history,
                               int perspective);
std::string render_anticipated(GameKind game, const json& anticipated);

// Action extraction grammars (one per game).
std::optional<int> parse_last_int(const std::string& text, int lo, int hi);
std::optional<double> parse_first_number(const std::string& text);
std::optional<json> parse_last_json_object(const std::string& text,
                                           const std::string& required_key);

std::optional<Action> parse_action(GameKind game, const std::string& text,
                                   int perspective, const EnvSnapshot& env);

// Human-readable one-liner for an anticipated action.
std::string describe_action(GameKind game, const Action& action);

// The zero-shot reasoning elicitation appended by the CoT template.
extern const char* kCotElicitation;
// The expert persona preamble used by the Persona template.
extern const char* kPersonaPreamble;

}  // namespace klr
