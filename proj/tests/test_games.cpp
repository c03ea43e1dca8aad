#include <doctest.h>

#include <algorithm>
#include <vector>

#include "klr/core/rng.hpp"
#include "klr/games/g08a.hpp"
#include "klr/games/neg.hpp"
#include "klr/games/pd.hpp"
#include "klr/games/sag.hpp"
#include "oracles.hpp"

using namespace klr;
using klr_oracles::brute_force_winners;

namespace {

G08AState fresh_g08a(int n) {
  G08AState state;
  state.num_agents = n;
  state.scores.assign(n, 0);
  return state;
}

}  // namespace

TEST_CASE("g08a: worked rounds") {
  G08AState state = fresh_g08a(5);
  auto r = g08a_step(state, {{0, 10}, {1, 20}, {2, 30}, {3, 40}, {4, 50}});
  CHECK(r.average == Rational(30, 1));
  CHECK(r.target == Rational(24, 1));
  REQUIRE(r.winners.size() == 1);
  CHECK(r.winners[0] == 1);  // |20-24| = 4 beats |30-24| = 6
  CHECK(state.scores[1] == 1);

  G08AState two = fresh_g08a(2);
  auto r2 = g08a_step(two, {{0, 20}, {1, 28}});
  CHECK(r2.target == Rational(96, 5));  // 19.2
  REQUIRE(r2.winners.size() == 1);
  CHECK(r2.winners[0] == 0);
}

TEST_CASE("g08a: all-equal choices award nothing") {
  G08AState state = fresh_g08a(5);
  auto r = g08a_step(state, {{0, 40}, {1, 40}, {2, 40}, {3, 40}, {4, 40}});
  CHECK(r.winners.empty());
  CHECK(std::all_of(state.scores.begin(), state.scores.end(),
                    [](int s) { return s == 0; }));
}

TEST_CASE("g08a: exact arithmetic on a non-dyadic target") {
  G08AState state = fresh_g08a(3);
  auto r = g08a_step(state, {{0, 1}, {1, 2}, {2, 4}});
  CHECK(r.target == Rational(28, 15));  // 1.8666...
  REQUIRE(r.winners.size() == 1);
  CHECK(r.winners[0] == 1);
}

TEST_CASE("g08a: randomized rounds match the brute-force oracle") {
  RngStream rng(20240811);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(2, 6));
    std::vector<std::pair<int, int>> choices;
    for (int i = 0; i < n; ++i)
      choices.emplace_back(i, static_cast<int>(rng.uniform_int(1, 100)));

    G08AState state = fresh_g08a(n);
    auto r = g08a_step(state, choices);
    CHECK(r.winners == brute_force_winners(choices));
  }
}

TEST_CASE("g08a: winners invariant under agent order permutation") {
  RngStream rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(2, 6));
    std::vector<std::pair<int, int>> choices;
    for (int i = 0; i < n; ++i)
      choices.emplace_back(i, static_cast<int>(rng.uniform_int(1, 100)));
    auto shuffled = choices;
    for (int i = n - 1; i > 0; --i)
      std::swap(shuffled[i], shuffled[rng.uniform_int(0, i)]);

    G08AState a = fresh_g08a(n), b = fresh_g08a(n);
    auto wa = g08a_step(a, choices).winners;
    auto wb = g08a_step(b, shuffled).winners;
    std::sort(wa.begin(), wa.end());
    std::sort(wb.begin(), wb.end());
    CHECK(wa == wb);
  }
}

// ---- SAG -----------------------------------------------------------------

using klr_oracles::OracleResident;
using klr_oracles::oracle_day;

TEST_CASE("sag: dry-streak fixture from the health rules") {
  SAGState state;
  state.agents.assign(2, SAGAgentState{});
  state.agents[0].balance = 100;
  state.agents[1].balance = 100;

  // Agent 1 outbids every day; agent 0 dries out.
  auto r1 = sag_step(state, {{0, 10}, {1, 50}});
  CHECK(r1.winner == 1);
  CHECK(state.agents[0].health == 7);   // streak 1
  CHECK(state.agents[1].health == 10);  // 8 + 2

  state.agents[0].balance += 100;
  state.agents[1].balance += 100;
  sag_step(state, {{0, 10}, {1, 50}});
  CHECK(state.agents[0].health == 5);  // streak 2

  state.agents[0].balance += 100;
  state.agents[1].balance += 100;
  auto r3 = sag_step(state, {{0, 90}, {1, 50}});
  CHECK(r3.winner == 0);
  CHECK(state.agents[0].health == 7);  // +2, streak reset
  CHECK(state.agents[0].dry_streak == 0);
}

TEST_CASE("sag: tied highest bid allocates nothing and everyone dries") {
  SAGState state;
  state.agents.assign(3, SAGAgentState{});
  for (auto& a : state.agents) a.balance = 100;
  auto r = sag_step(state, {{0, 100}, {1, 100}, {2, 30}});
  CHECK_FALSE(r.winner.has_value());
  for (const auto& a : state.agents) {
    CHECK(a.dry_streak == 1);
    CHECK(a.health == 7);
    CHECK(a.balance == 100);  // nobody paid
  }
}

TEST_CASE("sag: randomized days match the straight-line oracle") {
  RngStream rng(991);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(2, 5));
    SAGState state;
    std::vector<OracleResident> oracle;
    std::vector<std::pair<int, std::int64_t>> bids;
    for (int i = 0; i < n; ++i) {
      SAGAgentState a;
      a.health = static_cast<int>(rng.uniform_int(1, 10));
      a.balance = rng.uniform_int(0, 300);
      a.dry_streak = static_cast<int>(rng.uniform_int(0, 3));
      state.agents.push_back(a);
      oracle.push_back({a.health, a.balance, a.dry_streak, true});
      bids.emplace_back(i, rng.uniform_int(0, a.balance));
    }

    auto got = sag_step(state, bids);
    auto want = oracle_day(oracle, bids);

    CHECK(got.winner == want.winner);
    CHECK(got.eliminated == want.eliminated);
    for (int i = 0; i < n; ++i) {
      CHECK(state.agents[i].health == oracle[i].health);
      CHECK(state.agents[i].balance == oracle[i].balance);
      CHECK(state.agents[i].dry_streak == oracle[i].streak);
      CHECK(state.agents[i].alive == oracle[i].alive);
    }
  }
}

TEST_CASE("sag: money conservation and health cap over a random game") {
  RngStream rng(123);
  SAGState state;
  state.agents.assign(4, SAGAgentState{});

  std::int64_t total_prices = 0;
  std::int64_t total_income = 0;
  for (int day = 1; day <= 10 && state.alive_count() > 1; ++day) {
    std::vector<std::pair<int, std::int64_t>> bids;
    for (int i = 0; i < 4; ++i) {
      if (!state.agents[i].alive) continue;
      state.agents[i].balance += 100;
      total_income += 100;
      bids.emplace_back(i, rng.uniform_int(0, state.agents[i].balance));
    }
    auto r = sag_step(state, bids);
    if (r.winner) total_prices += r.price;
    for (const auto& a : state.agents) CHECK(a.health <= 10);
  }
  std::int64_t balances = 0;
  for (const auto& a : state.agents) balances += a.balance;
  CHECK(balances == total_income - total_prices);
}

// ---- NEG -----------------------------------------------------------------

namespace {

NEGState fixture_neg(std::array<int, 3> pool, std::array<std::array<int, 3>, 2> utils) {
  NEGState state;
  state.pool = pool;
  state.utilities = utils;
  return state;
}

}  // namespace

TEST_CASE("neg: propose then accept fixes the allocation") {
  NEGState state = fixture_neg({2, 2, 2}, {{{5, 3, 1}, {1, 3, 5}}});
  NegMove propose;
  propose.kind = NegMove::Kind::Propose;
  NegAllocation alloc;
  alloc.counts = {{{2, 2, 0}, {0, 0, 2}}};
  propose.allocation = alloc;
  neg_step(state, 0, propose);
  CHECK(state.pending.has_value());

  NegMove accept;
  accept.kind = NegMove::Kind::Accept;
  neg_step(state, 1, accept);
  CHECK(state.status == NegStatus::Agreed);
  REQUIRE(state.agreed.has_value());

  auto score = neg_score(state);
  CHECK(score.utilities[0] == 2 * 5 + 2 * 3);
  CHECK(score.utilities[1] == 2 * 5);
  CHECK(score.winner == 0);
}

TEST_CASE("neg: utility arithmetic fixture") {
  // Pool sized so "all peppers + 1 cherry" vs "the rest" is exact.
  NEGState state = fixture_neg({2, 2, 1}, {{{5, 3, 1}, {1, 3, 5}}});
  NegAllocation alloc;
  alloc.counts = {{{2, 1, 0}, {0, 1, 1}}};
  REQUIRE(neg_allocation_valid(state, alloc));
  state.agreed = alloc;
  state.status = NegStatus::Agreed;
  auto score = neg_score(state);
  CHECK(score.utilities[0] == 13);
  CHECK(score.utilities[1] == 8);
  CHECK(score.winner == 0);
}

TEST_CASE("neg: mirrored utilities and split tie has no winner") {
  NEGState state = fixture_neg({2, 2, 2}, {{{5, 3, 1}, {1, 3, 5}}});
  NegAllocation alloc;
  alloc.counts = {{{2, 1, 0}, {0, 1, 2}}};
  state.agreed = alloc;
  state.status = NegStatus::Agreed;
  auto score = neg_score(state);
  CHECK(score.utilities[0] == score.utilities[1]);
  CHECK_FALSE(score.winner.has_value());
}

TEST_CASE("neg: failed negotiation scores zero for both") {
  NEGState state = fixture_neg({2, 2, 2}, {{{5, 3, 1}, {1, 3, 5}}});
  NegMove walk;
  walk.kind = NegMove::Kind::WalkAway;
  neg_step(state, 0, walk);
  CHECK(state.status == NegStatus::Failed);
  auto score = neg_score(state);
  CHECK(score.utilities[0] == 0);
  CHECK(score.utilities[1] == 0);
  CHECK_FALSE(score.winner.has_value());
}

TEST_CASE("neg: accepted allocation must conserve the pool") {
  NEGState state = fixture_neg({2, 2, 2}, {{{5, 3, 1}, {1, 3, 5}}});
  NegAllocation bad;
  bad.counts = {{{2, 2, 2}, {1, 0, 0}}};  // creates a pepper
  CHECK_FALSE(neg_allocation_valid(state, bad));
  NegAllocation good;
  good.counts = {{{1, 1, 1}, {1, 1, 1}}};
  CHECK(neg_allocation_valid(state, good));
}

TEST_CASE("neg: hitting the move cap without an accept fails the negotiation") {
  MatchConfig config;
  config.game_kind = GameKind::NEG;
  config.num_agents = 2;
  config.max_rounds = 6;
  config.game_params["utilities"] = {{5, 3, 1}, {1, 3, 5}};

  struct Chatter : Decider {
    DecisionResult decide(const DecisionContext&) override {
      DecisionResult r;
      NegMove m;
      m.kind = NegMove::Kind::Message;
      m.text = "still thinking";
      r.action = m;
      return r;
    }
  };
  NEGEngine engine;
  std::vector<std::shared_ptr<Decider>> deciders{std::make_shared<Chatter>(),
                                                 std::make_shared<Chatter>()};
  const MatchRecord record = run_match(config, engine, deciders);
  CHECK(record.rounds.size() == 6);
  CHECK(record.outcome.at("status") == "failed");
  CHECK_FALSE(record.outcome.contains("winner"));
  CHECK(record.outcome.at("utilities") == json::array({0, 0}));
}

TEST_CASE("neg: engine downgrades invalid accepts and proposals to messages") {
  MatchConfig config;
  config.game_kind = GameKind::NEG;
  config.num_agents = 2;
  config.game_params["utilities"] = {{5, 3, 1}, {1, 3, 5}};
  NEGEngine engine;
  engine.reset(config);

  std::vector<std::string> flags;
  NegMove accept;
  accept.kind = NegMove::Kind::Accept;
  Action sanitized = engine.sanitize(0, accept, flags);
  CHECK(std::get<NegMove>(sanitized).kind == NegMove::Kind::Message);
  REQUIRE(flags.size() == 1);
  CHECK(flags[0] == "invalid_accept_as_message");
}

// ---- PD ------------------------------------------------------------------

TEST_CASE("pd: payoff matrix lookups") {
  PdMatrix m;
  CHECK(pd_payoff(PdAction::Cooperate, PdAction::Cooperate, m) == std::pair{3, 3});
  CHECK(pd_payoff(PdAction::Defect, PdAction::Cooperate, m) == std::pair{5, 0});
  CHECK(pd_payoff(PdAction::Cooperate, PdAction::Defect, m) == std::pair{0, 5});
  CHECK(pd_payoff(PdAction::Defect, PdAction::Defect, m) == std::pair{1, 1});
}

TEST_CASE("pd: malformed matrices rejected") {
  PdMatrix bad;
  bad.temptation = 3;
  bad.reward = 3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  PdMatrix bad2;  // violates 2R > T + S
  bad2.temptation = 10;
  bad2.reward = 4;
  bad2.punishment = 1;
  bad2.sucker = 0;
  CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
}

TEST_CASE("pd: cumulative payoffs equal the sum of lookups") {
  MatchConfig config;
  config.game_kind = GameKind::PD;
  config.num_agents = 2;
  PDEngine engine;
  engine.reset(config);

  RngStream rng(5);
  std::array<std::int64_t, 2> expected{0, 0};
  for (int round = 0; round < 10; ++round) {
    const PdAction a = rng.uniform_int(0, 1) ? PdAction::Defect : PdAction::Cooperate;
    const PdAction b = rng.uniform_int(0, 1) ? PdAction::Defect : PdAction::Cooperate;
    const auto [p1, p2] = pd_payoff(a, b, PdMatrix{});
    expected[0] += p1;
    expected[1] += p2;
    engine.apply({{0, a}, {1, b}});
  }
  CHECK(engine.state().payoffs == expected);
}
