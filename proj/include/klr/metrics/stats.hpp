#pragma once

#include <optional>
#include <string>
#include <vector>

#include "klr/core/match.hpp"

namespace klr {

double mean_of(const std::vector<double>& values);
double sample_stddev(const std::vector<double>& values);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided tail probability of Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct TTestResult {
  double t = 0;
  double p = 1;
  double df = 0;
  bool significant = false;  // p < 0.05
  bool degenerate = false;   // zero-variance convention applied
};

// Welch's unequal-variance t-test (two-sided). Identical zero-variance
// samples give p = 1 by convention; zero-variance samples with different
// means give p = 0. Both are flagged degenerate.
TTestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Pooled-variance Student variant, same conventions.
TTestResult student_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Reasoning-level proxy: log_alpha(choice / 50).
double strategic_depth(double choice, double alpha);

// Per-round win rate (G0.8A) or per-game win rate with draws at 0.5 (NEG).
double win_rate(const std::vector<MatchRecord>& records, int player);
// Same, one value per record (for spread and significance tests).
std::vector<double> per_record_win_rate(const std::vector<MatchRecord>& records,
                                        int player);

double avg_survival_round(const std::vector<MatchRecord>& records, int player);
std::vector<double> per_record_survival(const std::vector<MatchRecord>& records,
                                        int player);

struct PredAccResult {
  double mean_deviation = 0;
  std::vector<double> per_round;  // mean |pred - actual| by round index
  int num_predictions = 0;
};

// |predicted summary - realized quantity|: group average for G0.8A, highest
// opponent bid for SAG. Errors if the records' method logged no predictions.
PredAccResult pred_acc(const std::vector<MatchRecord>& records, int player);

// Per-round mean |final - initial| for draft-then-revise methods.
std::vector<double> tuning_range(const std::vector<MatchRecord>& records, int player);

struct MetricsReport {
  std::string game;
  std::string metric;  // "win_rate" | "avg_survival_round"
  std::vector<double> per_repeat;
  double mean = 0;
  double stddev = 0;
  std::optional<PredAccResult> prediction_accuracy;
  int num_tests = 0;
};

json to_json(const MetricsReport& r);

MetricsReport compute_metrics(const std::vector<MatchRecord>& records, int player);

}  // namespace klr
