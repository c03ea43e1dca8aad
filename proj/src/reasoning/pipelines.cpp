#include "klr/reasoning/pipelines.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

namespace klr {

namespace {

PromptInputs base_inputs(const DecisionContext& ctx) {
  PromptInputs in;
  in.ctx = &ctx;
  in.perspective = ctx.self;
  in.include_private = true;
  return in;
}

json anticipated_json(GameKind game,
                      const std::vector<std::pair<int, Action>>& predictions) {
  json arr = json::array();
  for (const auto& [agent, action] : predictions)
    arr.push_back(json{{"agent", agent},
                       {"description", describe_action(game, action)},
                       {"action", action_to_json(action)}});
  return arr;
}

// Content after the last "Prediction" marker, up to end of line.
std::optional<std::string> prediction_line(const std::string& text) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  const std::size_t pos = lower.rfind("prediction");
  if (pos == std::string::npos) return std::nullopt;
  std::size_t start = pos + 10;
  while (start < text.size() && (text[start] == ':' || text[start] == ' '))
    ++start;
  const std::size_t end = text.find('\n', start);
  std::string line = text.substr(start, end == std::string::npos ? std::string::npos
                                                                 : end - start);
  while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
    line.pop_back();
  if (line.empty()) return std::nullopt;
  return line;
}

std::string trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.erase(s.begin());
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.pop_back();
  return s;
}

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

Completion ReasoningDecider::call(const PromptContext& prompt, Usage& usage) {
  Completion c = backend_->complete(prompt);
  usage += c.usage;
  return c;
}

Action ReasoningDecider::parse_or_fallback(const DecisionContext& ctx,
                                           int perspective,
                                           const std::string& text,
                                           std::vector<std::string>& flags,
                                           const std::string& flag_label) const {
  if (auto action = parse_action(ctx.game, text, perspective, *ctx.env))
    return *action;
  flags.push_back(flag_label);
  return fallback_action(ctx.game, perspective, *ctx.history, ctx.round);
}

DecisionResult ReasoningDecider::single_decide(const DecisionContext& ctx,
                                               const std::string& method) {
  const PromptContext prompt =
      build_prompt(*catalog_, ctx.game, method, "decide", ctx.self, base_inputs(ctx));
  DecisionResult result;
  const Completion c = call(prompt, result.usage);
  result.action =
      parse_or_fallback(ctx, ctx.self, c.text, result.flags, "fallback_action");
  return result;
}

DecisionResult DirectDecider::decide(const DecisionContext& ctx) {
  return single_decide(ctx, "direct");
}

DecisionResult CotDecider::decide(const DecisionContext& ctx) {
  return single_decide(ctx, "cot");
}

DecisionResult PersonaDecider::decide(const DecisionContext& ctx) {
  return single_decide(ctx, "persona");
}

// ---- PCoT ---------------------------------------------------------------------

DecisionResult PcotDecider::decide(const DecisionContext& ctx) {
  const PromptContext prompt = build_prompt(*catalog_, ctx.game, "pcot", "decide",
                                            ctx.self, base_inputs(ctx));
  DecisionResult result;
  const Completion c = call(prompt, result.usage);

  if (const auto line = prediction_line(c.text)) {
    json prediction;
    if (const auto scalar = parse_first_number(*line))
      prediction["summary"] = *scalar;
    else
      prediction["text"] = *line;
    result.prediction = prediction;
  } else {
    result.flags.push_back("prediction_missing");
  }
  result.action =
      parse_or_fallback(ctx, ctx.self, c.text, result.flags, "fallback_action");
  return result;
}

// ---- Reflect -------------------------------------------------------------------

DecisionResult ReflectDecider::decide(const DecisionContext& ctx) {
  PromptInputs in = base_inputs(ctx);
  std::string memory_text;
  for (const auto& lesson : memory_) {
    if (!memory_text.empty()) memory_text += "\n";
    memory_text += "- " + lesson;
  }
  in.memory = memory_text;
  const PromptContext prompt =
      build_prompt(*catalog_, ctx.game, "reflect", "decide", ctx.self, in);
  DecisionResult result;
  const Completion c = call(prompt, result.usage);
  result.action =
      parse_or_fallback(ctx, ctx.self, c.text, result.flags, "fallback_action");
  return result;
}

Usage ReflectDecider::on_round_end(const RoundFeedback& fb) {
  DecisionContext ctx;
  ctx.game = fb.env_before.game_kind;
  ctx.self = fb.self;
  ctx.num_agents = fb.history->num_agents();
  ctx.round = fb.round;
  ctx.max_rounds = fb.max_rounds;
  ctx.env = &fb.env_before;
  ctx.history = fb.history;
  ctx.private_state = fb.private_state;
  ctx.sampling = fb.sampling;

  PromptInputs in;
  in.ctx = &ctx;
  in.perspective = fb.self;
  in.result = summarize_feedback(ctx.game, fb);
  const PromptContext prompt =
      build_prompt(*catalog_, ctx.game, "reflect", "update", fb.self, in);

  Usage usage;
  try {
    const Completion c = call(prompt, usage);
    std::string lesson = c.text;
    const std::size_t pos = lesson.find("Lesson:");
    if (pos != std::string::npos) lesson = lesson.substr(pos + 7);
    lesson = trim(lesson);
    if (!lesson.empty()) memory_.push_back(lesson);
  } catch (const std::exception&) {
    // Memory unchanged on failure; the transcript keeps the failed attempts.
  }
  return usage;
}

// ---- Refine --------------------------------------------------------------------

DecisionResult RefineDecider::decide(const DecisionContext& ctx) {
  DecisionResult result;

  PromptInputs in = base_inputs(ctx);
  const PromptContext draft_prompt =
      build_prompt(*catalog_, ctx.game, "refine", "draft", ctx.self, in);
  const Completion draft_completion = call(draft_prompt, result.usage);
  const Action draft = parse_or_fallback(ctx, ctx.self, draft_completion.text,
                                         result.flags, "fallback_draft");
  result.initial_action = draft;

  try {
    in.draft = describe_action(ctx.game, draft);
    const PromptContext critique_prompt =
        build_prompt(*catalog_, ctx.game, "refine", "critique", ctx.self, in);
    const Completion critique = call(critique_prompt, result.usage);

    in.critique = trim(critique.text);
    const PromptContext revise_prompt =
        build_prompt(*catalog_, ctx.game, "refine", "revise", ctx.self, in);
    const Completion revised = call(revise_prompt, result.usage);
    if (auto action = parse_action(ctx.game, revised.text, ctx.self, *ctx.env)) {
      result.action = *action;
    } else {
      result.flags.push_back("revision_unparsed_kept_draft");
      result.action = draft;
    }
  } catch (const std::exception&) {
    result.flags.push_back("refine_failed_kept_draft");
    result.action = draft;
  }
  return result;
}

// ---- K-Level Reasoning ----------------------------------------------------------

Action KrDecider::reason_at(const DecisionContext& ctx, int perspective, int level,
                            std::vector<Anticipation>* top_level_out,
                            std::vector<std::string>& flags, Usage& usage,
                            std::map<std::string, Action>& memo,
                            bool self_call) {
  PromptInputs in;
  in.ctx = &ctx;
  in.perspective = perspective;
  // Private context rides only on the player's own decision calls. Inside
  // the recursion even the player is simulated from public data: a simulated
  // opponent cannot know what the player privately values.
  in.include_private = self_call;

  std::string method = "direct";
  if (level > 1) {
    std::vector<Anticipation> anticipations;
    for (int other = 0; other < ctx.num_agents; ++other) {
      if (other == perspective) continue;
      Anticipation a;
      a.agent = other;
      a.action = reason_at(ctx, other, level - 1, nullptr, flags, usage, memo,
                           /*self_call=*/false);
      anticipations.push_back(std::move(a));
    }
    std::vector<std::pair<int, Action>> predicted;
    for (const auto& a : anticipations) predicted.emplace_back(a.agent, a.action);
    in.anticipated = anticipated_json(ctx.game, predicted);
    method = "kr";
    if (top_level_out != nullptr) *top_level_out = std::move(anticipations);
  }

  const PromptContext prompt =
      build_prompt(*catalog_, ctx.game, method, "decide", ctx.self, in);

  if (memoize_) {
    const auto it = memo.find(prompt.rendered());
    if (it != memo.end()) return it->second;
  }

  const Completion c = call(prompt, usage);
  Action action;
  if (auto parsed = parse_action(ctx.game, c.text, perspective, *ctx.env)) {
    action = *parsed;
  } else {
    flags.push_back(top_level_out != nullptr
                        ? "fallback_action"
                        : "anticipation_fallback_agent_" +
                              std::to_string(perspective));
    action = fallback_action(ctx.game, perspective, *ctx.history, ctx.round);
  }
  if (memoize_) memo[prompt.rendered()] = action;
  return action;
}

DecisionResult KrDecider::decide(const DecisionContext& ctx) {
  DecisionResult result;
  std::map<std::string, Action> memo;

  if (draft_then_revise_) {
    // Level-1 draft before the recursion so the adjustment size is
    // measurable the same way Refine's is.
    std::map<std::string, Action> draft_memo;
    result.initial_action =
        reason_at(ctx, ctx.self, 1, nullptr, result.flags, result.usage,
                  draft_memo, /*self_call=*/true);
  }

  std::vector<Anticipation> anticipations;
  result.action = reason_at(ctx, ctx.self, k_, &anticipations, result.flags,
                            result.usage, memo, /*self_call=*/true);

  if (k_ > 1) {
    std::vector<std::pair<int, Action>> predicted;
    for (const auto& a : anticipations) predicted.emplace_back(a.agent, a.action);
    result.prediction = summarize_predictions(ctx.game, predicted);
  }
  return result;
}

// ---- shared helpers --------------------------------------------------------------

json summarize_predictions(GameKind game,
                           const std::vector<std::pair<int, Action>>& predictions) {
  json per_opponent = json::object();
  for (const auto& [agent, action] : predictions)
    per_opponent[std::to_string(agent)] = action_to_json(action);
  json out{{"per_opponent", per_opponent}};

  if (game == GameKind::G08A) {
    double sum = 0;
    int n = 0;
    for (const auto& [agent, action] : predictions)
      if (std::holds_alternative<int>(action)) {
        sum += std::get<int>(action);
        n += 1;
      }
    if (n > 0) out["summary"] = sum / n;
  } else if (game == GameKind::SAG) {
    std::int64_t best = -1;
    for (const auto& [agent, action] : predictions)
      if (std::holds_alternative<int>(action))
        best = std::max<std::int64_t>(best, std::get<int>(action));
    if (best >= 0) out["summary"] = double(best);
  }
  return out;
}

std::string summarize_feedback(GameKind game, const RoundFeedback& fb) {
  switch (game) {
    case GameKind::G08A: {
      const double target = fb.result.value("target_value", 0.0);
      const auto winners = fb.result.value("winners", std::vector<int>{});
      const bool won =
          std::find(winners.begin(), winners.end(), fb.self) != winners.end();
      return "the target was " + fmt2(target) + ", you chose " +
             std::to_string(std::get<int>(fb.own_action)) +
             (won ? " and won the round." : " and did not win.");
    }
    case GameKind::SAG: {
      std::string out = "you bid $" + std::to_string(std::get<int>(fb.own_action)) + "; ";
      if (fb.result.contains("winner")) {
        if (fb.result.at("winner").get<int>() == fb.self)
          out += "you won the water at $" +
                 std::to_string(fb.result.value("price", std::int64_t(0))) + ".";
        else
          out += "the water went for $" +
                 std::to_string(fb.result.value("price", std::int64_t(0))) +
                 " to someone else.";
      } else {
        out += "the highest bid was tied, nobody got water.";
      }
      return out;
    }
    case GameKind::NEG:
      return "the dialogue status is now " + fb.result.value("status", "open") + ".";
    case GameKind::PD: {
      const auto& actions = fb.result.at("actions");
      return "the joint play was " + actions.at(0).get<std::string>() + " vs " +
             actions.at(1).get<std::string>() + ".";
    }
  }
  return "";
}

std::shared_ptr<Decider> make_reasoning_decider(
    const std::string& method, std::shared_ptr<DecisionBackend> backend,
    const PromptCatalog* catalog, int k, const json& params) {
  if (method == "direct")
    return std::make_shared<DirectDecider>(std::move(backend), catalog);
  if (method == "cot")
    return std::make_shared<CotDecider>(std::move(backend), catalog);
  if (method == "persona")
    return std::make_shared<PersonaDecider>(std::move(backend), catalog);
  if (method == "pcot")
    return std::make_shared<PcotDecider>(std::move(backend), catalog);
  if (method == "reflect")
    return std::make_shared<ReflectDecider>(std::move(backend), catalog);
  if (method == "refine")
    return std::make_shared<RefineDecider>(std::move(backend), catalog);
  if (method == "kr")
    return std::make_shared<KrDecider>(std::move(backend), catalog, k,
                                       params.value("memoize", false),
                                       params.value("draft_then_revise", false));
  throw std::invalid_argument("unknown reasoning method: " + method);
}

bool is_reasoning_method(const std::string& method) {
  return method == "direct" || method == "cot" || method == "persona" ||
         method == "pcot" || method == "reflect" || method == "refine" ||
         method == "kr";
}

bool method_logs_predictions(const std::string& method) {
  return method == "pcot" || method == "kr";
}

}  // namespace klr
