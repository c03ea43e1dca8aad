#include "klr/strategies/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace klr {

namespace {

constexpr std::uint64_t kMonoDiffTag = 0x4d4f4e4fULL;

int clamp_choice(std::int64_t v) {
  return static_cast<int>(std::clamp<std::int64_t>(v, 1, 100));
}

int round_clamp(double v) { return clamp_choice(std::llround(v)); }

}  // namespace

std::string StrategySpec::label() const {
  switch (kind) {
    case StrategyKind::ZeroLevelFix: return "0-Level (Fix)";
    case StrategyKind::ZeroLevelVar: return "0-Level (Var)";
    case StrategyKind::MonoTrendFix: return "MonoTrend (Fix)";
    case StrategyKind::MonoTrendVar: return "MonoTrend (Var)";
    case StrategyKind::LastBidsFix: return "LastBids (Fix)";
    case StrategyKind::LastBidsVar: return "LastBids (Var)";
  }
  throw std::logic_error("unknown StrategyKind");
}

std::optional<StrategySpec> strategy_spec_from_label(const std::string& label,
                                                     bool variance_as_stddev) {
  StrategySpec spec;
  if (label == "0-Level (Fix)" || label == "zero_level_fix")
    spec.kind = StrategyKind::ZeroLevelFix;
  else if (label == "0-Level (Var)" || label == "zero_level_var")
    spec.kind = StrategyKind::ZeroLevelVar;
  else if (label == "MonoTrend (Fix)" || label == "mono_trend_fix")
    spec.kind = StrategyKind::MonoTrendFix;
  else if (label == "MonoTrend (Var)" || label == "mono_trend_var")
    spec.kind = StrategyKind::MonoTrendVar;
  else if (label == "LastBids (Fix)" || label == "last_bids_fix")
    spec.kind = StrategyKind::LastBidsFix;
  else if (label == "LastBids (Var)" || label == "last_bids_var")
    spec.kind = StrategyKind::LastBidsVar;
  else
    return std::nullopt;
  if (variance_as_stddev) spec.spread = 5.0;
  return spec;
}

bool is_strategy_label(const std::string& label) {
  return strategy_spec_from_label(label).has_value();
}

std::optional<int> previous_target_choice(const PublicHistory& history) {
  const std::size_t rounds = history.rounds_completed();
  if (rounds == 0) return std::nullopt;
  std::int64_t sum = 0;
  int n = 0;
  for (const auto& entries : history.per_agent) {
    if (entries.size() < rounds) continue;  // joined late / eliminated
    const auto& action = entries[rounds - 1].action;
    if (!std::holds_alternative<int>(action)) continue;
    sum += std::get<int>(action);
    n += 1;
  }
  if (n == 0) return std::nullopt;
  // target = 0.8 * sum/n = 4*sum/(5*n), rounded half up in exact arithmetic.
  const std::int64_t num = 4 * sum;
  const std::int64_t den = 5LL * n;
  return clamp_choice((2 * num + den) / (2 * den));
}

StrategySpec resolve_strategy(const StrategySpec& spec, std::uint64_t match_seed,
                              int agent) {
  StrategySpec resolved = spec;
  if (spec.kind == StrategyKind::MonoTrendVar) {
    RngStream stream(derive_seed(match_seed, std::uint64_t(agent), 0, kMonoDiffTag));
    resolved.common_diff = static_cast<int>(stream.uniform_int(1, 5));
  }
  return resolved;
}

int next_choice(const StrategySpec& spec, const PublicHistory& history, int round,
                RngStream& rng) {
  if (round < 1) throw std::invalid_argument("next_choice: round must be >= 1");
  switch (spec.kind) {
    case StrategyKind::ZeroLevelFix:
      return 40;
    case StrategyKind::ZeroLevelVar:
      return round_clamp(rng.normal(40.0, spec.spread));
    case StrategyKind::MonoTrendFix:
    case StrategyKind::MonoTrendVar:
      return clamp_choice(std::int64_t(spec.start) -
                          std::int64_t(round - 1) * spec.common_diff);
    case StrategyKind::LastBidsFix:
      return previous_target_choice(history).value_or(40);
    case StrategyKind::LastBidsVar: {
      const int anchor = previous_target_choice(history).value_or(40);
      return round_clamp(rng.normal(double(anchor), spec.spread));
    }
  }
  throw std::logic_error("unknown StrategyKind");
}

DecisionResult StrategyDecider::decide(const DecisionContext& ctx) {
  if (ctx.game != GameKind::G08A)
    throw std::invalid_argument("programmatic strategies only play G0.8A");
  const StrategySpec resolved = resolve_strategy(spec_, ctx.match_seed, ctx.self);
  RngStream rng = ctx.stream();
  DecisionResult result;
  result.action = next_choice(resolved, *ctx.history, ctx.round, rng);
  return result;
}

}  // namespace klr
