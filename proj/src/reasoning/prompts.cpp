#include "klr/reasoning/prompts.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace klr {

const char* kCotElicitation =
    "Let's think step by step, then give your final answer as a single "
    "integer on the last line.";

const char* kPersonaPreamble =
    "You are a Game Expert: a master of game theory who reads opponents "
    "carefully and always plays the move that maximizes your own result.";

namespace {

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void replace_all(std::string& text, const std::string& key,
                 const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
}

// ---- builtin template assembly ------------------------------------------

struct GameFragments {
  std::string rules;       // system message body
  std::string ask;         // "give me an action" closing instruction
  std::string pcot_ask;    // predict-then-act closing instruction
  std::string kr_lead_in;  // introduces the {anticipated} block
};

const GameFragments& fragments(GameKind game) {
  static const GameFragments g08a{
      "You are Player {self}, one of {num_agents} players in a repeated "
      "number game. Each round, every player simultaneously picks an integer "
      "between 1 and 100. After the round, the target is revealed: 0.8 times "
      "the average of all chosen numbers. The player whose number is closest "
      "to the target scores a point; if every player picks the same number, "
      "no one scores. The game lasts {max_rounds} rounds.",
      "Pick your number. Reply with a single integer between 1 and 100 on "
      "the last line.",
      "First predict the average of all players' chosen numbers this round "
      "and write it as \"Prediction: <number>\". Then pick your own number "
      "and write it as \"Action: <integer between 1 and 100>\" on the last "
      "line.",
      "Predictions for the other players this round:"};
  static const GameFragments sag{
      "You are Player {self}, one of {num_agents} residents enduring a "
      "{max_rounds}-day drought. Each day every surviving resident receives "
      "$100 income, then all submit sealed bids for the day's water supply. "
      "The unique highest bidder pays their bid and gains 2 health points "
      "(10 maximum); if the highest bid is tied, nobody gets the water. "
      "Every resident who does not win the water loses health equal to their "
      "current run of consecutive dry days. A resident whose health falls to "
      "0 is eliminated. Everyone starts with 8 health.",
      "Submit your sealed bid in whole dollars. Reply with a single "
      "non-negative integer no larger than your balance on the last line.",
      "First predict the highest bid your opponents will make today and "
      "write it as \"Prediction: <number>\". Then choose your own bid and "
      "write it as \"Action: <whole dollars>\" on the last line.",
      "Predictions for the other residents' bids today:"};
  static const GameFragments neg{
      "You are Agent {self}, negotiating with one other agent over a shared "
      "pool of items. Each of you privately values each item type. You take "
      "turns; on your turn you may send a message, propose a split of the "
      "whole pool, accept the opponent's pending proposal, or walk away. On "
      "acceptance each agent scores the sum of their private values over the "
      "items they receive, and the higher total wins. If the negotiation "
      "ends without agreement, both score zero. The dialogue is capped at "
      "{max_rounds} turns.",
      "Make your move. Reply with a JSON object on the last line: "
      "{\"move\": \"propose\", \"self\": [p, c, s]} to take p peppers, c "
      "cherries and s strawberries for yourself (the opponent gets the "
      "rest), {\"move\": \"accept\"}, {\"move\": \"walk_away\"}, or "
      "{\"move\": \"message\", \"text\": \"...\"}.",
      "First predict the opponent's next move and write it as \"Prediction: "
      "<short description>\". Then make your own move as a JSON object on "
      "the last line as described.",
      "Prediction for the opponent's next move:"};
  static const GameFragments pd{
      "You are Player {self} in a repeated two-player dilemma of "
      "{max_rounds} rounds. Each round both players simultaneously choose C "
      "(cooperate) or D (defect). If both choose C, both score {R}. If both "
      "choose D, both score {P}. If you choose D while they choose C, you "
      "score {T} and they score {S}; reversed roles reverse the payoffs.",
      "Choose your move. Reply with a JSON object on the last line: "
      "{\"action\": \"C\"} or {\"action\": \"D\"}.",
      "First predict the opponent's move this round and write it as "
      "\"Prediction: C or D\". Then choose your own move as a JSON object "
      "on the last line: {\"action\": \"C\"} or {\"action\": \"D\"}.",
      "Prediction for the opponent this round:"};
  switch (game) {
    case GameKind::G08A: return g08a;
    case GameKind::SAG: return sag;
    case GameKind::NEG: return neg;
    case GameKind::PD: return pd;
  }
  throw std::logic_error("fragments: unknown game");
}

std::string join_user(std::initializer_list<std::string> parts) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty() && out.back() != '\n') out += "\n";
    out += p;
  }
  return out;
}

PromptCatalog make_builtin() {
  PromptCatalog catalog;
  const std::string turn = "{turn_label} {round} of {max_rounds}.";
  for (GameKind game : {GameKind::G08A, GameKind::SAG, GameKind::NEG, GameKind::PD}) {
    const GameFragments& f = fragments(game);
    const std::string sys = "[SYSTEM]\n" + f.rules + "\n[USER]\n";
    const std::string state = "{env}\n{history}" + turn;

    catalog.set(game, "direct", "decide", sys + join_user({state, f.ask}));
    catalog.set(game, "cot", "decide",
                sys + join_user({state, f.ask, kCotElicitation}));
    catalog.set(game, "persona", "decide",
                "[SYSTEM]\n" + std::string(kPersonaPreamble) + " " + f.rules +
                    "\n[USER]\n" + join_user({state, f.ask}));
    catalog.set(game, "pcot", "decide", sys + join_user({state, f.pcot_ask}));
    catalog.set(game, "reflect", "decide",
                sys + join_user({state,
                                 "Lessons you noted after earlier rounds:\n{memory}",
                                 f.ask}));
    catalog.set(game, "reflect", "update",
                sys + join_user({"{env}\n" + turn + " It just ended: {result}",
                                 "In one or two sentences, note the most useful "
                                 "lesson for your next round. Start with "
                                 "\"Lesson:\"."}));
    catalog.set(game, "refine", "draft", sys + join_user({state, f.ask}));
    catalog.set(game, "refine", "critique",
                sys + join_user({state, "Your drafted move: {draft}",
                                 "Critique this draft: where does it lose "
                                 "against how the others are likely to play? "
                                 "Reply with a short critique."}));
    catalog.set(game, "refine", "revise",
                sys + join_user({state, "Your drafted move: {draft}",
                                 "A reviewer's critique of the draft: {critique}",
                                 "Taking the critique into account, make your "
                                 "final decision. " + f.ask}));
    catalog.set(game, "kr", "decide",
                sys + join_user({state, f.kr_lead_in + "\n{anticipated}",
                                 "Taking these predicted moves into account, "
                                 "make your decision. " +
                                     f.ask}));
  }
  return catalog;
}

std::string player_name(GameKind game, int index) {
  return (game == GameKind::NEG ? "Agent " : "Player ") + std::to_string(index);
}

std::string turn_label(GameKind game) {
  switch (game) {
    case GameKind::SAG: return "Day";
    case GameKind::NEG: return "Turn";
    default: return "Round";
  }
}

}  // namespace

// ---- catalog ---------------------------------------------------------------

std::string PromptCatalog::key(GameKind game, const std::string& method,
                               const std::string& step) {
  return to_string(game) + "_" + method + "_" + step;
}

const PromptCatalog& PromptCatalog::builtin() {
  static const PromptCatalog catalog = make_builtin();
  return catalog;
}

void PromptCatalog::set(GameKind game, const std::string& method,
                        const std::string& step, const std::string& text) {
  templates_[key(game, method, step)] = text;
}

bool PromptCatalog::has(GameKind game, const std::string& method,
                        const std::string& step) const {
  return templates_.count(key(game, method, step)) > 0;
}

const std::string& PromptCatalog::get(GameKind game, const std::string& method,
                                      const std::string& step) const {
  const auto it = templates_.find(key(game, method, step));
  if (it == templates_.end())
    throw std::invalid_argument("no template for " + key(game, method, step));
  return it->second;
}

void PromptCatalog::load_overrides(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::exists(dir)) throw std::runtime_error("template dir missing: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path());
    std::stringstream ss;
    ss << in.rdbuf();
    templates_[entry.path().stem().string()] = ss.str();
  }
}

void PromptCatalog::dump(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& [name, text] : templates_) {
    std::ofstream out(fs::path(dir) / (name + ".txt"));
    out << text;
  }
}

// ---- rendering ---------------------------------------------------------------

std::string render_env(GameKind game, const EnvSnapshot& env, int perspective,
                       int num_agents) {
  const json& st = env.public_state;
  std::string out;
  switch (game) {
    case GameKind::G08A: {
      const auto& past = st.at("past_rounds");
      if (past.empty()) {
        out = "No rounds have been played yet.";
        break;
      }
      out = "Results so far:";
      int r = 1;
      for (const auto& round : past) {
        out += "\nRound " + std::to_string(r++) + ": choices ";
        bool first = true;
        for (const auto& c : round.at("choices")) {
          if (!first) out += ", ";
          first = false;
          out += player_name(game, c.at("agent").get<int>()) + "=" +
                 std::to_string(c.at("choice").get<int>());
        }
        out += "; average " + fmt2(round.at("average_value").get<double>()) +
               "; target " + fmt2(round.at("target_value").get<double>());
        const auto& winners = round.at("winners");
        if (winners.empty()) {
          out += "; no winner";
        } else {
          out += "; winner(s):";
          for (const auto& w : winners) out += " " + player_name(game, w.get<int>());
        }
        out += ".";
      }
      out += "\nScores: ";
      for (int i = 0; i < num_agents; ++i) {
        if (i) out += ", ";
        out += player_name(game, i) + "=" +
               std::to_string(st.at("scores").at(i).get<int>());
      }
      out += ".";
      break;
    }
    case GameKind::SAG: {
      out = "Residents today:";
      const auto& agents = st.at("agents");
      for (int i = 0; i < static_cast<int>(agents.size()); ++i) {
        const auto& a = agents.at(i);
        out += "\n" + player_name(game, i) + ": ";
        if (!a.at("alive").get<bool>()) {
          out += "eliminated";
          continue;
        }
        out += "health " + std::to_string(a.at("health").get<int>()) +
               ", balance $" + std::to_string(a.at("balance").get<std::int64_t>()) +
               ", dry streak " + std::to_string(a.at("dry_streak").get<int>());
        if (i == perspective) out += " (you)";
      }
      const auto& auctions = st.at("past_auctions");
      if (!auctions.empty()) {
        out += "\nPast auctions:";
        int day = 1;
        for (const auto& au : auctions) {
          out += "\nDay " + std::to_string(day++) + ": bids ";
          bool first = true;
          for (const auto& b : au.at("bids")) {
            if (!first) out += ", ";
            first = false;
            out += player_name(game, b.at("agent").get<int>()) + "=$" +
                   std::to_string(b.at("bid").get<std::int64_t>());
          }
          if (au.contains("winner"))
            out += "; " + player_name(game, au.at("winner").get<int>()) +
                   " won at $" + std::to_string(au.at("price").get<std::int64_t>());
          else
            out += "; tie, water unallocated";
          out += ".";
        }
      }
      break;
    }
    case GameKind::NEG: {
      const auto& pool = st.at("pool");
      out = "Item pool: " + std::to_string(pool.at(0).get<int>()) + " peppers, " +
            std::to_string(pool.at(1).get<int>()) + " cherries, " +
            std::to_string(pool.at(2).get<int>()) + " strawberries.";
      const auto& dialogue = st.at("dialogue");
      if (!dialogue.empty()) {
        out += "\nDialogue so far:";
        for (const auto& d : dialogue) {
          out += "\n" + player_name(game, d.at("agent").get<int>()) + ": " +
                 d.at("kind").get<std::string>();
          if (d.contains("allocation")) {
            const auto& alloc = d.at("allocation").at(d.at("agent").get<int>());
            out += " taking [" + std::to_string(alloc.at(0).get<int>()) + ", " +
                   std::to_string(alloc.at(1).get<int>()) + ", " +
                   std::to_string(alloc.at(2).get<int>()) + "]";
          }
          if (d.contains("text")) out += " \"" + d.at("text").get<std::string>() + "\"";
        }
      }
      if (!st.at("pending").is_null()) {
        const auto& pending = st.at("pending");
        const int proposer = pending.at("proposer").get<int>();
        const auto& take = pending.at("allocation").at(proposer);
        const std::string counts = "[" + std::to_string(take.at(0).get<int>()) +
                                   ", " + std::to_string(take.at(1).get<int>()) +
                                   ", " + std::to_string(take.at(2).get<int>()) +
                                   "] of [peppers, cherries, strawberries]";
        if (proposer == perspective)
          out += "\nYour proposal is pending: you would take " + counts +
                 " and the opponent gets the rest.";
        else
          out += "\nPending proposal by " + player_name(game, proposer) +
                 ": they take " + counts + ", the rest is yours.";
      }
      break;
    }
    case GameKind::PD: {
      const auto& past = st.at("past_actions");
      if (past.empty()) {
        out = "No rounds have been played yet.";
      } else {
        out = "Results so far:";
        int r = 1;
        for (const auto& joint : past)
          out += "\nRound " + std::to_string(r++) + ": Player 0 played " +
                 joint.at(0).get<std::string>() + ", Player 1 played " +
                 joint.at(1).get<std::string>() + ".";
        out += "\nCumulative payoffs: Player 0=" +
               std::to_string(st.at("payoffs").at(0).get<std::int64_t>()) +
               ", Player 1=" +
               std::to_string(st.at("payoffs").at(1).get<std::int64_t>()) + ".";
      }
      break;
    }
  }
  return out;
}

std::string render_own_history(GameKind game, const PublicHistory& history,
                               int perspective) {
  if (perspective >= history.num_agents()) return "";
  const auto& entries = history.per_agent[perspective];
  if (entries.empty() || game == GameKind::NEG) return "";  // NEG: dialogue covers it
  std::string out = "Your own past actions:";
  for (const auto& e : entries) {
    out += "\n" + turn_label(game) + " " + std::to_string(e.env.round) + ": ";
    switch (game) {
      case GameKind::G08A:
        out += "you chose " + std::to_string(std::get<int>(e.action));
        break;
      case GameKind::SAG:
        out += "you bid $" + std::to_string(std::get<int>(e.action));
        break;
      case GameKind::PD:
        out += "you played " + to_string(std::get<PdAction>(e.action));
        break;
      default:
        break;
    }
    out += ".";
  }
  return out + "\n";
}

std::string describe_action(GameKind game, const Action& action) {
  switch (game) {
    case GameKind::G08A:
      return "chooses " + std::to_string(std::get<int>(action));
    case GameKind::SAG:
      return "bids $" + std::to_string(std::get<int>(action));
    case GameKind::PD:
      return std::string("plays ") + to_string(std::get<PdAction>(action));
    case GameKind::NEG: {
      const auto& m = std::get<NegMove>(action);
      switch (m.kind) {
        case NegMove::Kind::Accept: return "accepts the pending proposal";
        case NegMove::Kind::WalkAway: return "walks away";
        case NegMove::Kind::Message: return "sends a message";
        case NegMove::Kind::Propose: {
          if (!m.allocation) return "proposes a split";
          std::string out = "proposes taking [";
          for (int i = 0; i < 3; ++i) {
            if (i) out += ", ";
            out += std::to_string(m.allocation->counts[0][i]);
          }
          return out + "]";
        }
      }
    }
  }
  return "acts";
}

std::string render_anticipated(GameKind game, const json& anticipated) {
  std::string out;
  for (const auto& a : anticipated) {
    if (!out.empty()) out += "\n";
    out += "- " + player_name(game, a.at("agent").get<int>()) + " " +
           a.at("description").get<std::string>() + ".";
  }
  return out.empty() ? "- (no predictions available)" : out;
}

PromptContext build_prompt(const PromptCatalog& catalog, GameKind game,
                           const std::string& method, const std::string& step,
                           int player, const PromptInputs& inputs) {
  const DecisionContext& ctx = *inputs.ctx;
  std::string text = catalog.get(game, method, step);

  replace_all(text, "{self}", std::to_string(inputs.perspective));
  replace_all(text, "{num_agents}", std::to_string(ctx.num_agents));
  replace_all(text, "{num_opponents}", std::to_string(ctx.num_agents - 1));
  replace_all(text, "{max_rounds}", std::to_string(ctx.max_rounds));
  replace_all(text, "{round}", std::to_string(ctx.round));
  replace_all(text, "{turn_label}", turn_label(game));
  replace_all(text, "{env}",
              render_env(game, *ctx.env, inputs.perspective, ctx.num_agents));
  replace_all(text, "{history}",
              render_own_history(game, *ctx.history, inputs.perspective));
  replace_all(text, "{anticipated}", render_anticipated(game, inputs.anticipated));
  replace_all(text, "{memory}",
              inputs.memory.empty() ? "(none yet)" : inputs.memory);
  replace_all(text, "{draft}", inputs.draft);
  replace_all(text, "{critique}", inputs.critique);
  replace_all(text, "{result}", inputs.result);

  if (game == GameKind::PD) {
    const auto& m = ctx.env->public_state.at("matrix");
    replace_all(text, "{T}", std::to_string(m.at("T").get<int>()));
    replace_all(text, "{R}", std::to_string(m.at("R").get<int>()));
    replace_all(text, "{P}", std::to_string(m.at("P").get<int>()));
    replace_all(text, "{S}", std::to_string(m.at("S").get<int>()));
  }

  // Private context (own NEG utilities) rides along only on the player's own
  // top-level calls; anticipation calls never see it.
  if (game == GameKind::NEG && inputs.include_private &&
      ctx.private_state.contains("utilities")) {
    const auto& u = ctx.private_state.at("utilities");
    const std::string private_text =
        "Your private values: each pepper is worth " +
        std::to_string(u.at(0).get<int>()) + ", each cherry " +
        std::to_string(u.at(1).get<int>()) + ", each strawberry " +
        std::to_string(u.at(2).get<int>()) + " to you.";
    const std::size_t user_pos = text.find("[USER]\n");
    if (user_pos != std::string::npos)
      text.insert(user_pos + 7, private_text + "\n");
  }

  PromptContext prompt;
  prompt.game = game;
  prompt.method = method;
  prompt.step = step;
  prompt.player = player;
  prompt.perspective = inputs.perspective;
  prompt.round = ctx.round;
  prompt.sampling = ctx.sampling;

  const std::string sys_marker = "[SYSTEM]\n";
  const std::string user_marker = "\n[USER]\n";
  const std::size_t user_pos = text.find(user_marker);
  if (text.rfind(sys_marker, 0) != 0 || user_pos == std::string::npos)
    throw std::runtime_error("template missing [SYSTEM]/[USER] sections: " +
                             PromptCatalog::key(game, method, step));
  prompt.messages.push_back(
      {"system", text.substr(sys_marker.size(), user_pos - sys_marker.size())});
  prompt.messages.push_back({"user", text.substr(user_pos + user_marker.size())});

  // Structured mirror for scripted backends.
  prompt.meta["game"] = to_string(game);
  prompt.meta["round"] = ctx.round;
  prompt.meta["self"] = inputs.perspective;
  if (!inputs.anticipated.empty()) prompt.meta["anticipated"] = inputs.anticipated;
  const json& st = ctx.env->public_state;
  switch (game) {
    case GameKind::G08A: {
      const auto& past = st.at("past_rounds");
      if (!past.empty())
        prompt.meta["prev_target"] = static_cast<int>(
            std::llround(past.back().at("target_value").get<double>()));
      break;
    }
    case GameKind::SAG:
      prompt.meta["self_state"] = st.at("agents").at(inputs.perspective);
      break;
    case GameKind::NEG:
      prompt.meta["pool"] = st.at("pool");
      prompt.meta["pending"] = st.at("pending");
      prompt.meta["dialogue"] = st.at("dialogue");
      if (inputs.include_private && ctx.private_state.contains("utilities"))
        prompt.meta["self_state"] = json{{"utilities", ctx.private_state.at("utilities")}};
      break;
    case GameKind::PD:
      prompt.meta["matrix"] = st.at("matrix");
      break;
  }
  return prompt;
}

// ---- parsing ---------------------------------------------------------------

std::optional<int> parse_last_int(const std::string& text, int lo, int hi) {
  std::optional<int> found;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isdigit(static_cast<unsigned char>(text[i]))) {
      std::size_t j = i;
      long long value = 0;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])) &&
             value < 1000000000LL)
        value = value * 10 + (text[j++] - '0');
      const bool negative = i > 0 && text[i - 1] == '-';
      if (!negative && value >= lo && value <= hi)
        found = static_cast<int>(value);
      i = j;
    } else {
      ++i;
    }
  }
  return found;
}

std::optional<double> parse_first_number(const std::string& text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(text[i]))) {
      std::size_t end = i;
      while (end < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[end])) || text[end] == '.'))
        ++end;
      try {
        return std::stod(text.substr(i, end - i));
      } catch (...) {
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

std::optional<json> parse_last_json_object(const std::string& text,
                                           const std::string& required_key) {
  for (std::size_t start = text.rfind('{'); start != std::string::npos;
       start = (start == 0 ? std::string::npos : text.rfind('{', start - 1))) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (c == '\\') ++i;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '{') ++depth;
      else if (c == '}') {
        --depth;
        if (depth == 0) {
          const json parsed =
              json::parse(text.substr(start, i - start + 1), nullptr, false);
          if (!parsed.is_discarded() && parsed.is_object() &&
              parsed.contains(required_key))
            return parsed;
          break;
        }
      }
    }
    if (start == 0) break;
  }
  return std::nullopt;
}

std::optional<Action> parse_action(GameKind game, const std::string& text,
                                   int perspective, const EnvSnapshot& env) {
  switch (game) {
    case GameKind::G08A: {
      const auto v = parse_last_int(text, 1, 100);
      if (!v) return std::nullopt;
      return Action{*v};
    }
    case GameKind::SAG: {
      const auto v = parse_last_int(text, 0, 1000000000);
      if (!v) return std::nullopt;
      return Action{*v};
    }
    case GameKind::PD: {
      if (const auto j = parse_last_json_object(text, "action")) {
        try {
          return Action{pd_action_from_string(j->at("action").get<std::string>())};
        } catch (...) {
          return std::nullopt;
        }
      }
      // Bare C/D as a last resort.
      for (auto it = text.rbegin(); it != text.rend(); ++it) {
        if (*it == 'C' || *it == 'c') return Action{PdAction::Cooperate};
        if (*it == 'D' || *it == 'd') return Action{PdAction::Defect};
      }
      return std::nullopt;
    }
    case GameKind::NEG: {
      if (const auto j = parse_last_json_object(text, "move")) {
        try {
          NegMove move;
          move.kind = neg_move_kind_from_string(j->at("move").get<std::string>());
          if (j->contains("text")) move.text = j->at("text").get<std::string>();
          if (move.kind == NegMove::Kind::Propose) {
            if (!j->contains("self")) return std::nullopt;
            const auto& pool = env.public_state.at("pool");
            NegAllocation alloc;
            for (int item = 0; item < 3; ++item) {
              const int take = j->at("self").at(item).get<int>();
              alloc.counts[perspective][item] = take;
              alloc.counts[1 - perspective][item] = pool.at(item).get<int>() - take;
            }
            move.allocation = alloc;
          }
          return Action{move};
        } catch (...) {
          return std::nullopt;
        }
      }
      // Any other non-empty text is a plain message.
      std::string trimmed = text;
      while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
        trimmed.pop_back();
      if (trimmed.empty()) return std::nullopt;
      NegMove move;
      move.kind = NegMove::Kind::Message;
      move.text = trimmed;
      return Action{move};
    }
  }
  return std::nullopt;
}

}  // namespace klr
