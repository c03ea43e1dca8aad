#pragma once

#include <string>
#include <vector>

#include "klr/core/types.hpp"
#include "klr/strategies/strategies.hpp"

namespace klr {

// Bayesian posterior over a finite space of opponent strategies, observed
// through one agent's public G0.8A choices.

struct Hypothesis {
  std::string label;
  double weight = 0;  // posterior mass
  StrategySpec spec;
};

// Mass the strategy puts on observing `choice` at `round` given the public
// history so far. Deterministic rules give 1 on a match and epsilon
// otherwise; Normal-sampling rules give the discretized Normal mass on the
// rounded, clamped integer; MonoTrend (Var) mixes uniformly over its five
// possible differences each round.
double strategy_likelihood(const StrategySpec& spec, const PublicHistory& history,
                           int round, int choice, double epsilon = 1e-6);

class OpponentModel {
 public:
  // Uniform prior by default. Specs must already be resolved except for the
  // MonoTrend (Var) latent difference, which the model expands itself.
  explicit OpponentModel(const std::vector<StrategySpec>& hypotheses,
                         std::vector<double> prior = {});

  // One Bayes step on the observed choice of the modeled agent.
  void observe(const PublicHistory& history, int round, int choice);

  const std::vector<Hypothesis>& hypotheses() const { return hypotheses_; }
  std::vector<double> posterior() const;
  double posterior_of(const std::string& label) const;
  bool had_degenerate_reset() const { return degenerate_resets_ > 0; }

  // Predictive mixture over choices 1..100 for the next round, and its mean.
  std::vector<double> predictive_distribution(const PublicHistory& history,
                                              int round) const;
  double predict_mean(const PublicHistory& history, int round) const;

  static constexpr double kEpsilon = 1e-6;
  static constexpr double kWeightFloor = 1e-15;

 private:
  void normalize();

  std::vector<Hypothesis> hypotheses_;
  int degenerate_resets_ = 0;
};

// One row per observation step of a posterior trace.
struct PosteriorTracePoint {
  int t = 0;                       // observations consumed
  std::vector<double> weights;
  double prediction = 0;           // mixture mean before observing round t
  int actual = 0;
  double deviation = 0;
};

std::string posterior_trace_csv(const std::vector<std::string>& labels,
                                const std::vector<PosteriorTracePoint>& trace);

// Synthetic concentration run: the observed agent plays `true_spec` among
// four fixed-pattern context agents that keep the target moving; the model
// watches the observed agent only. Returns one trace point per round.
std::vector<PosteriorTracePoint> concentration_trace(
    const std::vector<StrategySpec>& space, const StrategySpec& true_spec,
    std::uint64_t seed, int rounds);

}  // namespace klr
