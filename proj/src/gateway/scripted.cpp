#include "klr/gateway/scripted.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace klr {

namespace {

std::string script_echo40(const PromptContext&) { return "40"; }

// Tracks the previous round's target; plays 40 before any target exists.
std::string script_prev_target(const PromptContext& ctx) {
  const int v = ctx.meta.value("prev_target", 40);
  return std::to_string(v);
}

std::string script_sag_modest(const PromptContext& ctx) {
  const auto self = ctx.meta.value("self_state", json::object());
  const std::int64_t balance = self.value("balance", 0);
  const int dry = self.value("dry_streak", 0);
  const std::int64_t bid = std::min<std::int64_t>(balance, 20 + 10LL * dry);
  return std::to_string(bid);
}

std::string script_sag_allin(const PromptContext& ctx) {
  const auto self = ctx.meta.value("self_state", json::object());
  return std::to_string(self.value("balance", 0));
}

// Cooperates at the base of the recursion, best-responds once it holds a
// prediction of the opponent (in PD the best response is always Defect).
std::string script_pd_level(const PromptContext& ctx) {
  const bool has_anticipation =
      ctx.meta.contains("anticipated") && !ctx.meta.at("anticipated").empty();
  return has_anticipation ? R"({"action": "D"})" : R"({"action": "C"})";
}

// Deterministic negotiator: opens greedy, concedes its least-valued item
// type on each later proposal, accepts anything worth at least half of its
// value for the whole pool.
std::string script_neg_concede(const PromptContext& ctx) {
  const auto pool = ctx.meta.value("pool", std::vector<int>{2, 2, 2});
  const auto self = ctx.meta.value("self_state", json::object());
  const auto utils = self.value("utilities", std::vector<int>{1, 1, 1});

  int pool_value = 0;
  for (int i = 0; i < 3; ++i) pool_value += pool[i] * utils[i];

  if (ctx.meta.contains("pending") && !ctx.meta.at("pending").is_null()) {
    const auto& pending = ctx.meta.at("pending");
    const int self_index = ctx.meta.value("self", 0);
    if (pending.value("proposer", -1) != self_index) {
      int offered = 0;
      for (int i = 0; i < 3; ++i)
        offered += pending.at("allocation").at(self_index).at(i).get<int>() * utils[i];
      if (2 * offered >= pool_value) return R"({"move": "accept"})";
    }
  }

  // Own proposals so far drive the concession schedule.
  int own_proposals = 0;
  const int self_index = ctx.meta.value("self", 0);
  for (const auto& entry : ctx.meta.value("dialogue", json::array()))
    if (entry.value("agent", -1) == self_index && entry.value("kind", "") == "propose")
      own_proposals += 1;

  std::array<int, 3> order{0, 1, 2};  // ascending by own utility
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return utils[a] < utils[b]; });

  json take = json::array({pool[0], pool[1], pool[2]});
  const int concessions = std::min(own_proposals, 2);
  for (int c = 0; c < concessions + 1 && c < 3; ++c) take[order[c]] = 0;
  // First proposal already gives away the least-valued item type; walking the
  // schedule further hands over the next one each time.
  json move{{"move", "propose"}, {"self", take}};
  return move.dump();
}

}  // namespace

ScriptRegistry& ScriptRegistry::instance() {
  static ScriptRegistry registry;
  return registry;
}

ScriptRegistry::ScriptRegistry() {
  scripts_["echo40"] = script_echo40;
  scripts_["prev_target"] = script_prev_target;
  scripts_["sag_modest"] = script_sag_modest;
  scripts_["sag_allin"] = script_sag_allin;
  scripts_["pd_level"] = script_pd_level;
  scripts_["neg_concede"] = script_neg_concede;
}

void ScriptRegistry::register_script(const std::string& id, ScriptFn fn) {
  scripts_[id] = std::move(fn);
}

bool ScriptRegistry::contains(const std::string& id) const {
  if (id.rfind("fixed:", 0) == 0) return true;
  return scripts_.count(id) > 0;
}

ScriptFn ScriptRegistry::resolve(const std::string& id) const {
  if (id.rfind("fixed:", 0) == 0) {
    const std::string text = id.substr(6);
    return [text](const PromptContext&) { return text; };
  }
  const auto it = scripts_.find(id);
  if (it == scripts_.end())
    throw std::invalid_argument("unknown script id: " + id);
  return it->second;
}

Completion ScriptedBackend::attempt(const PromptContext& ctx) {
  Completion c;
  c.text = script_(ctx);
  c.usage.input_tokens = estimate_tokens(ctx.rendered());
  c.usage.output_tokens = estimate_tokens(c.text);
  return c;
}

}  // namespace klr
