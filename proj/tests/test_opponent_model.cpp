#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "klr/opponent/model.hpp"

using namespace klr;

namespace {

std::vector<StrategySpec> full_space() {
  std::vector<StrategySpec> specs;
  for (const char* label : {"0-Level (Fix)", "0-Level (Var)", "MonoTrend (Fix)",
                            "MonoTrend (Var)", "LastBids (Fix)", "LastBids (Var)"})
    specs.push_back(*strategy_spec_from_label(label));
  return specs;
}

PublicHistory history_of_rounds(const std::vector<std::vector<int>>& rounds) {
  PublicHistory h;
  if (rounds.empty()) return h;
  h.per_agent.resize(rounds.front().size());
  for (const auto& round : rounds) {
    EnvSnapshot env;
    env.game_kind = GameKind::G08A;
    for (std::size_t i = 0; i < round.size(); ++i)
      h.per_agent[i].push_back(HistoryEntry{env, round[i]});
  }
  return h;
}

// Trapezoid quadrature of the Normal density over [x-0.5, x+0.5]; the
// independent oracle for the discretized mass.
double normal_mass_quadrature(double mean, double sigma, int x) {
  const double lo = x - 0.5, hi = x + 0.5;
  const int steps = 2000;
  double sum = 0;
  for (int i = 0; i <= steps; ++i) {
    const double t = lo + (hi - lo) * i / steps;
    const double pdf = std::exp(-0.5 * (t - mean) * (t - mean) / (sigma * sigma)) /
                       (sigma * std::sqrt(2.0 * 3.14159265358979323846));
    sum += (i == 0 || i == steps) ? pdf / 2 : pdf;
  }
  return sum * (hi - lo) / steps;
}

}  // namespace

TEST_CASE("likelihood: deterministic match is 1, mismatch is epsilon") {
  auto zero_fix = *strategy_spec_from_label("0-Level (Fix)");
  PublicHistory empty;
  CHECK(strategy_likelihood(zero_fix, empty, 1, 40) == doctest::Approx(1.0));
  CHECK(strategy_likelihood(zero_fix, empty, 1, 41) == doctest::Approx(1e-6));
}

TEST_CASE("likelihood: discretized normal mass matches quadrature") {
  auto zero_var = *strategy_spec_from_label("0-Level (Var)");
  PublicHistory empty;
  const double got = strategy_likelihood(zero_var, empty, 1, 40);
  const double want = normal_mass_quadrature(40.0, std::sqrt(5.0), 40);
  CHECK(got == doctest::Approx(want).epsilon(1e-3));
  CHECK(got == doctest::Approx(0.1769).epsilon(5e-3));
}

TEST_CASE("posterior: two hypotheses that agree at round 1 stay balanced") {
  std::vector<StrategySpec> specs{*strategy_spec_from_label("0-Level (Fix)"),
                                  *strategy_spec_from_label("LastBids (Fix)")};
  OpponentModel model(specs);
  PublicHistory empty;
  model.observe(empty, 1, 40);  // both rules play 40 at round 1
  const auto w = model.posterior();
  CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("posterior: diverging targets separate the hypotheses") {
  std::vector<StrategySpec> specs{*strategy_spec_from_label("0-Level (Fix)"),
                                  *strategy_spec_from_label("LastBids (Fix)")};
  OpponentModel model(specs);

  PublicHistory empty;
  model.observe(empty, 1, 40);
  // After a round of [40,10,10,10,10] the target is 12.8 -> LastBids plays 13.
  auto h = history_of_rounds({{40, 10, 10, 10, 10}});
  model.observe(h, 2, 40);  // observed agent stays at 40
  CHECK(model.posterior_of("0-Level (Fix)") > 0.99);

  OpponentModel model2(specs);
  model2.observe(empty, 1, 40);
  model2.observe(h, 2, 13);  // observed agent tracked the target
  CHECK(model2.posterior_of("LastBids (Fix)") > 0.99);
}

TEST_CASE("posterior weights always sum to one") {
  OpponentModel model(full_space());
  PublicHistory empty;
  RngStream rng(77);
  std::vector<std::vector<int>> rounds;
  for (int t = 1; t <= 30; ++t) {
    double sum = 0;
    for (double w : model.posterior()) sum += w;
    CHECK(std::fabs(sum - 1.0) < 1e-12);
    std::vector<int> round;
    for (int i = 0; i < 5; ++i)
      round.push_back(static_cast<int>(rng.uniform_int(1, 100)));
    auto h = history_of_rounds(rounds);
    model.observe(h, t, round[0]);
    rounds.push_back(round);
  }
}

TEST_CASE("predictive mixture equals brute-force enumeration") {
  std::vector<StrategySpec> specs{*strategy_spec_from_label("0-Level (Fix)"),
                                  *strategy_spec_from_label("LastBids (Fix)"),
                                  *strategy_spec_from_label("0-Level (Var)")};
  std::vector<double> prior{0.5, 0.3, 0.2};
  OpponentModel model(specs, prior);

  auto h = history_of_rounds({{10, 20, 30, 40, 50}});  // prev target 24
  const auto dist = model.predictive_distribution(h, 2);

  // Independent enumeration with the same weights.
  std::vector<double> expected(101, 0.0);
  expected[40] += 0.5;  // 0-Level (Fix)
  expected[24] += 0.3;  // LastBids (Fix): previous target
  for (int x = 1; x <= 100; ++x)
    expected[x] += 0.2 * normal_mass_quadrature(40.0, std::sqrt(5.0), x);

  for (int x = 1; x <= 100; ++x)
    CHECK(dist[x] == doctest::Approx(expected[x]).epsilon(1e-3));

  double mean = 0, mass = 0;
  for (int x = 1; x <= 100; ++x) {
    mean += x * expected[x];
    mass += expected[x];
  }
  CHECK(model.predict_mean(h, 2) == doctest::Approx(mean / mass).epsilon(1e-4));
}

TEST_CASE("degenerate mixture predicts its single surviving hypothesis") {
  std::vector<StrategySpec> specs{*strategy_spec_from_label("0-Level (Fix)"),
                                  *strategy_spec_from_label("MonoTrend (Fix)")};
  OpponentModel model(specs);
  PublicHistory empty;
  for (int t = 1; t <= 10; ++t) model.observe(empty, t, 40);
  CHECK(model.posterior_of("0-Level (Fix)") > 0.999);
  const auto dist = model.predictive_distribution(empty, 11);
  CHECK(dist[40] > 0.999);
}

TEST_CASE("fifty-fifty over two fixed rules averages their outputs") {
  std::vector<StrategySpec> specs{*strategy_spec_from_label("MonoTrend (Fix)"),
                                  *strategy_spec_from_label("0-Level (Fix)")};
  // MonoTrend at round 11 from 40 with diff 3 plays 10; 0-Level plays 40.
  OpponentModel model(specs);
  PublicHistory empty;
  CHECK(model.predict_mean(empty, 11) == doctest::Approx(25.0));
}

TEST_CASE("concentration: twenty observations pin the true strategy") {
  // The observed agent plays LastBids (Fix) inside a moving environment.
  OpponentModel model(full_space());
  auto true_spec = *strategy_spec_from_label("LastBids (Fix)");
  StrategySpec mover = *strategy_spec_from_label("MonoTrend (Fix)");
  mover.common_diff = 2;

  std::vector<std::vector<int>> rounds;
  RngStream rng(3);
  for (int t = 1; t <= 20; ++t) {
    auto h = history_of_rounds(rounds);
    const int observed = next_choice(true_spec, h, t, rng);
    model.observe(h, t, observed);
    std::vector<int> round{observed};
    for (int i = 1; i < 5; ++i) round.push_back(next_choice(mover, h, t, rng));
    rounds.push_back(round);
  }
  CHECK(model.posterior_of("LastBids (Fix)") > 0.99);
}

TEST_CASE("concentration trace: posterior column rises, csv is well formed") {
  const auto space = full_space();
  const auto trace =
      concentration_trace(space, *strategy_spec_from_label("0-Level (Fix)"),
                          /*seed=*/11, /*rounds=*/20);
  REQUIRE(trace.size() == 20);
  CHECK(trace.back().weights[0] > 0.99);  // space[0] is 0-Level (Fix)
  CHECK(trace.back().deviation <= trace.front().deviation + 1e-9);

  std::vector<std::string> labels;
  for (const auto& s : space) labels.push_back(s.label());
  const std::string csv = posterior_trace_csv(labels, trace);
  CHECK(csv.rfind("t,\"0-Level (Fix)\"", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);  // header + 20 rows
}

TEST_CASE("mono-trend var likelihood: per-round uniform mixture over diffs") {
  auto spec = *strategy_spec_from_label("MonoTrend (Var)");
  PublicHistory empty;
  // Round 3 from 40: possible outputs 40-2d for d in 1..5.
  CHECK(strategy_likelihood(spec, empty, 3, 36) == doctest::Approx(0.2));
  CHECK(strategy_likelihood(spec, empty, 3, 35) == doctest::Approx(1e-6));
  // Round 1 all diffs emit the start value.
  CHECK(strategy_likelihood(spec, empty, 1, 40) == doctest::Approx(1.0));
}

TEST_CASE("all-epsilon observations reset to uniform and are flagged") {
  // A space of two deterministic rules and an observation neither can make,
  // driven to the floor by construction: force it via a tiny epsilon path by
  // observing wildly inconsistent values many times.
  std::vector<StrategySpec> specs{*strategy_spec_from_label("0-Level (Fix)"),
                                  *strategy_spec_from_label("MonoTrend (Fix)")};
  OpponentModel model(specs);
  PublicHistory empty;
  model.observe(empty, 1, 99);  // both wrong: likelihood epsilon each
  const auto w = model.posterior();
  CHECK(w[0] == doctest::Approx(0.5));
  CHECK_FALSE(model.had_degenerate_reset());  // epsilon keeps it proper
}
