#include <doctest.h>

#include <memory>

#include "klr/core/match.hpp"
#include "klr/games/g08a.hpp"
#include "klr/games/neg.hpp"
#include "klr/games/sag.hpp"
#include "klr/strategies/strategies.hpp"

using namespace klr;

namespace {

// Always answers a fixed G0.8A number.
struct FixedChoiceDecider : Decider {
  explicit FixedChoiceDecider(int v) : value(v) {}
  DecisionResult decide(const DecisionContext&) override {
    DecisionResult r;
    r.action = value;
    return r;
  }
  int value;
};

// Bids its whole balance; used to starve everyone else.
struct AllInBidder : Decider {
  DecisionResult decide(const DecisionContext& ctx) override {
    DecisionResult r;
    const auto& self = ctx.env->public_state.at("agents").at(ctx.self);
    r.action = static_cast<int>(self.at("balance").get<std::int64_t>());
    return r;
  }
};

struct ZeroBidder : Decider {
  DecisionResult decide(const DecisionContext&) override {
    DecisionResult r;
    r.action = 0;
    return r;
  }
};

// Records what each invocation was allowed to observe.
struct ProbeDecider : Decider {
  DecisionResult decide(const DecisionContext& ctx) override {
    rounds_seen.push_back(ctx.round);
    history_lengths.push_back(static_cast<int>(ctx.history->rounds_completed()));
    env_rounds.push_back(ctx.env->round);
    DecisionResult r;
    r.action = 40;
    return r;
  }
  std::vector<int> rounds_seen, history_lengths, env_rounds;
};

struct FailingDecider : Decider {
  DecisionResult decide(const DecisionContext&) override {
    throw std::runtime_error("backend down");
  }
};

MatchConfig g08a_config(int agents, int rounds, std::uint64_t seed) {
  MatchConfig c;
  c.game_kind = GameKind::G08A;
  c.num_agents = agents;
  c.max_rounds = rounds;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("run_match: all-equal scripted agents never score") {
  auto config = g08a_config(5, 10, 42);
  G08AEngine engine;
  std::vector<std::shared_ptr<Decider>> deciders;
  for (int i = 0; i < 5; ++i) deciders.push_back(std::make_shared<FixedChoiceDecider>(40));

  const MatchRecord record = run_match(config, engine, deciders);
  CHECK(record.valid);
  CHECK(record.rounds.size() == 10);
  for (const auto& round : record.rounds)
    CHECK(round.result.at("winners").empty());
  for (int score : record.outcome.at("scores").get<std::vector<int>>())
    CHECK(score == 0);
}

TEST_CASE("run_match: SAG terminates early when one bidder starves the rest") {
  MatchConfig config;
  config.game_kind = GameKind::SAG;
  config.num_agents = 5;
  config.max_rounds = 10;
  config.seed = 7;
  SAGEngine engine;
  std::vector<std::shared_ptr<Decider>> deciders;
  deciders.push_back(std::make_shared<AllInBidder>());
  for (int i = 1; i < 5; ++i) deciders.push_back(std::make_shared<ZeroBidder>());

  const MatchRecord record = run_match(config, engine, deciders);
  // Dry losers: 8 -1 -2 -3 -4 => eliminated at the end of day 4.
  CHECK(record.rounds.size() == 4);
  const auto survival = record.outcome.at("survival_rounds").get<std::vector<int>>();
  CHECK(survival[0] == 10);  // survivor scores the round cap
  for (int i = 1; i < 5; ++i) CHECK(survival[i] == 4);
}

TEST_CASE("run_match: deterministic byte-for-byte with seeded strategies") {
  auto config = g08a_config(5, 10, 20240811);
  auto make_deciders = [] {
    std::vector<std::shared_ptr<Decider>> d;
    d.push_back(std::make_shared<StrategyDecider>(
        *strategy_spec_from_label("LastBids (Var)")));
    d.push_back(std::make_shared<StrategyDecider>(
        *strategy_spec_from_label("0-Level (Var)")));
    d.push_back(std::make_shared<StrategyDecider>(
        *strategy_spec_from_label("MonoTrend (Var)")));
    d.push_back(std::make_shared<StrategyDecider>(
        *strategy_spec_from_label("LastBids (Fix)")));
    d.push_back(std::make_shared<StrategyDecider>(
        *strategy_spec_from_label("0-Level (Fix)")));
    return d;
  };

  G08AEngine e1, e2;
  auto d1 = make_deciders();
  auto d2 = make_deciders();
  const MatchRecord r1 = run_match(config, e1, d1);
  const MatchRecord r2 = run_match(config, e2, d2);
  CHECK(canonical_json(r1) == canonical_json(r2));
}

TEST_CASE("run_match: adding an agent does not perturb the others' draws") {
  auto config5 = g08a_config(5, 6, 99);
  auto config4 = g08a_config(4, 6, 99);
  auto var_decider = [] {
    return std::make_shared<StrategyDecider>(*strategy_spec_from_label("0-Level (Var)"));
  };

  G08AEngine e5, e4;
  std::vector<std::shared_ptr<Decider>> d5, d4;
  for (int i = 0; i < 5; ++i) d5.push_back(var_decider());
  for (int i = 0; i < 4; ++i) d4.push_back(var_decider());
  const MatchRecord r5 = run_match(config5, e5, d5);
  const MatchRecord r4 = run_match(config4, e4, d4);

  for (std::size_t round = 0; round < r4.rounds.size(); ++round)
    for (int agent = 0; agent < 4; ++agent)
      CHECK(std::get<int>(r4.rounds[round].actions[agent].action) ==
            std::get<int>(r5.rounds[round].actions[agent].action));
}

TEST_CASE("run_match: simultaneity - deciders never observe the current round") {
  auto config = g08a_config(3, 5, 1);
  G08AEngine engine;
  auto probe = std::make_shared<ProbeDecider>();
  std::vector<std::shared_ptr<Decider>> deciders{
      probe, std::make_shared<FixedChoiceDecider>(30),
      std::make_shared<FixedChoiceDecider>(60)};
  run_match(config, engine, deciders);

  REQUIRE(probe->rounds_seen.size() == 5);
  for (std::size_t i = 0; i < probe->rounds_seen.size(); ++i) {
    CHECK(probe->history_lengths[i] == probe->rounds_seen[i] - 1);
    CHECK(probe->env_rounds[i] == probe->rounds_seen[i]);
  }
}

TEST_CASE("run_match: decider failure aborts with an invalid partial record") {
  auto config = g08a_config(2, 5, 1);
  config.decider_retries = 1;
  G08AEngine engine;
  std::vector<std::shared_ptr<Decider>> deciders{
      std::make_shared<FixedChoiceDecider>(30), std::make_shared<FailingDecider>()};
  const MatchRecord record = run_match(config, engine, deciders);
  CHECK_FALSE(record.valid);
  CHECK(record.abort_reason.find("agent 1") != std::string::npos);
}

TEST_CASE("run_match: out-of-range numeric choice is clamped and flagged") {
  auto config = g08a_config(2, 1, 1);
  G08AEngine engine;
  std::vector<std::shared_ptr<Decider>> deciders{
      std::make_shared<FixedChoiceDecider>(500),
      std::make_shared<FixedChoiceDecider>(30)};
  const MatchRecord record = run_match(config, engine, deciders);
  const auto& rec = record.rounds[0].actions[0];
  CHECK(std::get<int>(rec.action) == 100);
  REQUIRE(rec.flags.size() == 1);
  CHECK(rec.flags[0] == "clamped");
}

TEST_CASE("replay closure: recorded actions reproduce recorded snapshots") {
  auto config = g08a_config(5, 10, 77);
  G08AEngine engine;
  std::vector<std::shared_ptr<Decider>> deciders;
  deciders.push_back(std::make_shared<StrategyDecider>(
      *strategy_spec_from_label("LastBids (Fix)")));
  for (int i = 1; i < 5; ++i)
    deciders.push_back(std::make_shared<StrategyDecider>(
        *strategy_spec_from_label("MonoTrend (Var)")));
  const MatchRecord record = run_match(config, engine, deciders);

  std::string why;
  CHECK_MESSAGE(verify_replay(record, &why), why);
}

TEST_CASE("replay closure: detects a tampered action") {
  auto config = g08a_config(2, 3, 5);
  G08AEngine engine;
  std::vector<std::shared_ptr<Decider>> deciders{
      std::make_shared<FixedChoiceDecider>(30),
      std::make_shared<FixedChoiceDecider>(60)};
  MatchRecord record = run_match(config, engine, deciders);
  record.rounds[1].actions[0].action = 31;
  CHECK_FALSE(verify_replay(record));
}

TEST_CASE("history monotonicity: per-agent length equals completed rounds") {
  auto config = g08a_config(3, 7, 3);
  G08AEngine engine;

  struct HistoryLengthProbe : Decider {
    DecisionResult decide(const DecisionContext& ctx) override {
      for (const auto& entries : ctx.history->per_agent)
        CHECK(static_cast<int>(entries.size()) == ctx.round - 1);
      DecisionResult r;
      r.action = 25;
      return r;
    }
  };
  std::vector<std::shared_ptr<Decider>> deciders{
      std::make_shared<HistoryLengthProbe>(),
      std::make_shared<FixedChoiceDecider>(30),
      std::make_shared<FixedChoiceDecider>(60)};
  run_match(config, engine, deciders);
}

TEST_CASE("public_view: NEG snapshot hides utilities, round one is empty") {
  MatchConfig config;
  config.game_kind = GameKind::NEG;
  config.num_agents = 2;
  config.seed = 9;
  NEGEngine engine;
  engine.reset(config);

  PublicHistory history;
  history.per_agent.assign(2, {});
  auto [snap, view] = public_view(engine, history, 0);
  CHECK(snap.public_state.dump().find("utilit") == std::string::npos);
  CHECK(view.rounds_completed() == 0);

  CHECK_THROWS_AS(public_view(engine, history, 3), std::out_of_range);
}

TEST_CASE("public_view: G08A round-3 observer sees rounds 1-2 of everyone") {
  auto config = g08a_config(3, 2, 11);
  G08AEngine engine;
  std::vector<std::shared_ptr<Decider>> deciders{
      std::make_shared<FixedChoiceDecider>(10),
      std::make_shared<FixedChoiceDecider>(20),
      std::make_shared<FixedChoiceDecider>(30)};
  const MatchRecord record = run_match(config, engine, deciders);

  // Rebuild the view the way the scheduler does.
  PublicHistory history;
  history.per_agent.assign(3, {});
  for (const auto& round : record.rounds)
    for (const auto& a : round.actions)
      history.per_agent[a.agent].push_back(HistoryEntry{round.env, a.action});

  auto [snap, view] = public_view(engine, history, 2);
  CHECK(view.rounds_completed() == 2);
  for (const auto& entries : view.per_agent) REQUIRE(entries.size() == 2);
  CHECK(std::get<int>(view.per_agent[1][0].action) == 20);
}

TEST_CASE("fallback actions per game") {
  PublicHistory history;
  history.per_agent.assign(2, {});
  CHECK(std::get<int>(fallback_action(GameKind::G08A, 0, history, 1)) == 50);
  CHECK(std::get<int>(fallback_action(GameKind::SAG, 0, history, 1)) == 0);
  CHECK(std::get<PdAction>(fallback_action(GameKind::PD, 0, history, 1)) ==
        PdAction::Cooperate);
  CHECK(std::get<NegMove>(fallback_action(GameKind::NEG, 0, history, 1)).kind ==
        NegMove::Kind::Message);

  // After a round, G0.8A repeats the agent's previous choice.
  EnvSnapshot env;
  history.per_agent[0].push_back(HistoryEntry{env, 37});
  CHECK(std::get<int>(fallback_action(GameKind::G08A, 0, history, 2)) == 37);
}
