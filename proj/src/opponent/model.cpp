#include "klr/opponent/model.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace klr {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Mass of round(clamp(Normal(mean, sigma))) at integer x in [1,100].
double discretized_normal_mass(double mean, double sigma, int x) {
  if (x < 1 || x > 100) return 0.0;
  const double lo = x == 1 ? -1e300 : (x - 0.5 - mean) / sigma;
  const double hi = x == 100 ? 1e300 : (x + 0.5 - mean) / sigma;
  return normal_cdf(hi) - normal_cdf(lo);
}

bool is_normal_sampling(StrategyKind kind) {
  return kind == StrategyKind::ZeroLevelVar || kind == StrategyKind::LastBidsVar;
}

double anchor_mean(const StrategySpec& spec, const PublicHistory& history) {
  if (spec.kind == StrategyKind::ZeroLevelVar) return 40.0;
  return double(previous_target_choice(history).value_or(40));
}

int deterministic_choice(const StrategySpec& spec, const PublicHistory& history,
                         int round) {
  RngStream unused(0);
  return next_choice(spec, history, round, unused);
}

}  // namespace

double strategy_likelihood(const StrategySpec& spec, const PublicHistory& history,
                           int round, int choice, double epsilon) {
  if (is_normal_sampling(spec.kind)) {
    const double mass =
        discretized_normal_mass(anchor_mean(spec, history), spec.spread, choice);
    return std::max(mass, epsilon);
  }
  if (spec.kind == StrategyKind::MonoTrendVar) {
    // Uniform mixture over the five possible common differences.
    int matches = 0;
    for (int diff = 1; diff <= 5; ++diff) {
      StrategySpec variant = spec;
      variant.common_diff = diff;
      if (deterministic_choice(variant, history, round) == choice) matches += 1;
    }
    return std::max(matches / 5.0, epsilon);
  }
  return deterministic_choice(spec, history, round) == choice ? 1.0 : epsilon;
}

OpponentModel::OpponentModel(const std::vector<StrategySpec>& hypotheses,
                             std::vector<double> prior) {
  if (hypotheses.empty())
    throw std::invalid_argument("OpponentModel: empty hypothesis space");
  if (prior.empty()) prior.assign(hypotheses.size(), 1.0 / hypotheses.size());
  if (prior.size() != hypotheses.size())
    throw std::invalid_argument("OpponentModel: prior size mismatch");

  double total = 0;
  for (double w : prior) {
    if (w <= 0)
      throw std::invalid_argument("OpponentModel: prior weights must be positive");
    total += w;
  }

  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    Hypothesis h;
    h.label = hypotheses[i].label();
    h.weight = prior[i] / total;
    h.spec = hypotheses[i];
    hypotheses_.push_back(std::move(h));
  }
}

void OpponentModel::observe(const PublicHistory& history, int round, int choice) {
  double total = 0;
  std::vector<double> lik(hypotheses_.size(), 0.0);
  for (std::size_t i = 0; i < hypotheses_.size(); ++i) {
    lik[i] = strategy_likelihood(hypotheses_[i].spec, history, round, choice,
                                 kEpsilon);
    total += hypotheses_[i].weight * lik[i];
  }

  if (total <= 0) {
    // Degenerate observation: nothing explains it, reset to uniform.
    degenerate_resets_ += 1;
    for (auto& h : hypotheses_) h.weight = 1.0 / hypotheses_.size();
    return;
  }

  for (std::size_t i = 0; i < hypotheses_.size(); ++i)
    hypotheses_[i].weight *= lik[i];
  normalize();
}

void OpponentModel::normalize() {
  double total = 0;
  for (auto& h : hypotheses_) {
    h.weight = std::max(h.weight, kWeightFloor);
    total += h.weight;
  }
  for (auto& h : hypotheses_) h.weight /= total;
}

std::vector<double> OpponentModel::posterior() const {
  std::vector<double> w;
  w.reserve(hypotheses_.size());
  for (const auto& h : hypotheses_) w.push_back(h.weight);
  return w;
}

double OpponentModel::posterior_of(const std::string& label) const {
  for (const auto& h : hypotheses_)
    if (h.label == label) return h.weight;
  throw std::invalid_argument("posterior_of: unknown hypothesis " + label);
}

std::vector<double> OpponentModel::predictive_distribution(
    const PublicHistory& history, int round) const {
  std::vector<double> dist(101, 0.0);  // index 1..100
  for (const auto& h : hypotheses_) {
    if (h.weight <= 0) continue;
    if (is_normal_sampling(h.spec.kind)) {
      const double mean = anchor_mean(h.spec, history);
      for (int x = 1; x <= 100; ++x)
        dist[x] += h.weight * discretized_normal_mass(mean, h.spec.spread, x);
    } else if (h.spec.kind == StrategyKind::MonoTrendVar) {
      for (int diff = 1; diff <= 5; ++diff) {
        StrategySpec variant = h.spec;
        variant.common_diff = diff;
        dist[deterministic_choice(variant, history, round)] += h.weight / 5.0;
      }
    } else {
      dist[deterministic_choice(h.spec, history, round)] += h.weight;
    }
  }
  return dist;
}

double OpponentModel::predict_mean(const PublicHistory& history, int round) const {
  const auto dist = predictive_distribution(history, round);
  double mean = 0, mass = 0;
  for (int x = 1; x <= 100; ++x) {
    mean += x * dist[x];
    mass += dist[x];
  }
  return mass > 0 ? mean / mass : 0.0;
}

std::vector<PosteriorTracePoint> concentration_trace(
    const std::vector<StrategySpec>& space, const StrategySpec& true_spec,
    std::uint64_t seed, int rounds) {
  const StrategySpec observed = resolve_strategy(true_spec, seed, 0);
  std::vector<StrategySpec> context;
  context.push_back(*strategy_spec_from_label("MonoTrend (Fix)"));
  context.back().common_diff = 2;
  context.push_back(*strategy_spec_from_label("LastBids (Fix)"));
  context.push_back(*strategy_spec_from_label("0-Level (Var)"));
  context.push_back(
      resolve_strategy(*strategy_spec_from_label("MonoTrend (Var)"), seed, 4));

  OpponentModel model(space);
  PublicHistory history;
  history.per_agent.assign(5, {});
  EnvSnapshot env;
  env.game_kind = GameKind::G08A;

  std::vector<PosteriorTracePoint> trace;
  for (int t = 1; t <= rounds; ++t) {
    // Simultaneous choices against the pre-round history.
    RngStream obs_rng(derive_seed(seed, 0, t, 1));
    const int observed_choice = next_choice(observed, history, t, obs_rng);
    std::array<int, 4> context_choices{};
    for (int j = 0; j < 4; ++j) {
      RngStream ctx_rng(derive_seed(seed, j + 1, t, 1));
      context_choices[j] = next_choice(context[j], history, t, ctx_rng);
    }

    PosteriorTracePoint point;
    point.t = t;
    point.prediction = model.predict_mean(history, t);
    point.actual = observed_choice;
    point.deviation = std::fabs(point.prediction - observed_choice);

    model.observe(history, t, observed_choice);
    point.weights = model.posterior();
    trace.push_back(std::move(point));

    env.round = t;
    history.per_agent[0].push_back(HistoryEntry{env, observed_choice});
    for (int j = 0; j < 4; ++j)
      history.per_agent[j + 1].push_back(HistoryEntry{env, context_choices[j]});
  }
  return trace;
}

std::string posterior_trace_csv(const std::vector<std::string>& labels,
                                const std::vector<PosteriorTracePoint>& trace) {
  std::string out = "t";
  for (const auto& l : labels) out += ",\"" + l + "\"";
  out += ",prediction,actual,deviation\n";
  char buf[64];
  for (const auto& point : trace) {
    out += std::to_string(point.t);
    for (double w : point.weights) {
      std::snprintf(buf, sizeof(buf), ",%.6f", w);
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.4f,%d,%.4f\n", point.prediction,
                  point.actual, point.deviation);
    out += buf;
  }
  return out;
}

}  // namespace klr
