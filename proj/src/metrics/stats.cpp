#include "klr/metrics/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "klr/gateway/tally.hpp"

namespace klr {

double mean_of(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mean_of: empty sample");
  double sum = 0;
  for (double v : values) sum += v;
  return sum / double(values.size());
}

double sample_stddev(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double m = mean_of(values);
  double ss = 0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / double(values.size() - 1));
}

// Continued fraction for the incomplete beta (Lentz's algorithm).
static double incbeta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-14;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0)
    throw std::invalid_argument("regularized_incomplete_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * incbeta_cf(a, b, x) / a;
  return 1.0 - front * incbeta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (df <= 0) throw std::invalid_argument("student_t_two_sided_p: df must be > 0");
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return regularized_incomplete_beta(df / 2.0, 0.5, x);
}

namespace {

struct SampleStats {
  double mean = 0;
  double var = 0;  // unbiased
  std::size_t n = 0;
};

SampleStats describe(const std::vector<double>& sample, const char* name) {
  if (sample.size() < 2)
    throw std::invalid_argument(std::string("t-test: sample ") + name +
                                " needs at least 2 values");
  SampleStats s;
  s.n = sample.size();
  for (double v : sample) s.mean += v;
  s.mean /= double(s.n);
  for (double v : sample) s.var += (v - s.mean) * (v - s.mean);
  s.var /= double(s.n - 1);
  if (!std::isfinite(s.var))
    throw std::invalid_argument("t-test: non-finite variance");
  return s;
}

TTestResult degenerate_result(const SampleStats& a, const SampleStats& b) {
  TTestResult r;
  r.degenerate = true;
  if (a.mean == b.mean) {
    r.t = 0;
    r.p = 1;
  } else {
    r.t = a.mean > b.mean ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
    r.p = 0;
    r.significant = true;
  }
  return r;
}

}  // namespace

TTestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  const SampleStats sa = describe(a, "a");
  const SampleStats sb = describe(b, "b");
  if (sa.var == 0 && sb.var == 0) return degenerate_result(sa, sb);

  const double se2 = sa.var / sa.n + sb.var / sb.n;
  TTestResult r;
  r.t = (sa.mean - sb.mean) / std::sqrt(se2);
  r.df = se2 * se2 /
         (sa.var * sa.var / (double(sa.n) * sa.n * (sa.n - 1)) +
          sb.var * sb.var / (double(sb.n) * sb.n * (sb.n - 1)));
  r.p = student_t_two_sided_p(r.t, r.df);
  r.significant = r.p < 0.05;
  return r;
}

TTestResult student_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  const SampleStats sa = describe(a, "a");
  const SampleStats sb = describe(b, "b");
  if (sa.var == 0 && sb.var == 0) return degenerate_result(sa, sb);

  const double df = double(sa.n + sb.n - 2);
  const double sp2 = ((sa.n - 1) * sa.var + (sb.n - 1) * sb.var) / df;
  TTestResult r;
  r.t = (sa.mean - sb.mean) / std::sqrt(sp2 * (1.0 / sa.n + 1.0 / sb.n));
  r.df = df;
  r.p = student_t_two_sided_p(r.t, r.df);
  r.significant = r.p < 0.05;
  return r;
}

double strategic_depth(double choice, double alpha) {
  if (choice <= 0) throw std::domain_error("strategic_depth: choice must be > 0");
  if (alpha <= 0 || alpha >= 1)
    throw std::domain_error("strategic_depth: alpha must be in (0,1)");
  return std::log(choice / 50.0) / std::log(alpha);
}

// ---- record aggregation -----------------------------------------------------

namespace {

void require_same_game(const std::vector<MatchRecord>& records, GameKind kind,
                       const char* what) {
  if (records.empty())
    throw std::invalid_argument(std::string(what) + ": no match records");
  for (const auto& r : records)
    if (r.config.game_kind != kind)
      throw std::invalid_argument(std::string(what) + ": wrong game in record set");
}

double g08a_record_win_rate(const MatchRecord& record, int player) {
  int wins = 0;
  for (const auto& round : record.rounds) {
    const auto winners = round.result.value("winners", std::vector<int>{});
    if (std::find(winners.begin(), winners.end(), player) != winners.end())
      wins += 1;
  }
  return record.rounds.empty() ? 0.0 : double(wins) / double(record.rounds.size());
}

double neg_record_win_rate(const MatchRecord& record, int player) {
  if (record.outcome.contains("winner"))
    return record.outcome.at("winner").get<int>() == player ? 1.0 : 0.0;
  return 0.5;  // draws and failures split the point
}

}  // namespace

std::vector<double> per_record_win_rate(const std::vector<MatchRecord>& records,
                                        int player) {
  if (records.empty()) throw std::invalid_argument("win_rate: no match records");
  const GameKind kind = records.front().config.game_kind;
  if (kind != GameKind::G08A && kind != GameKind::NEG)
    throw std::invalid_argument("win_rate: defined for G0.8A and NEG records");
  require_same_game(records, kind, "win_rate");

  std::vector<double> out;
  out.reserve(records.size());
  if (kind == GameKind::G08A) {
    const std::size_t rounds = records.front().rounds.size();
    for (const auto& r : records) {
      if (r.rounds.size() != rounds)
        throw std::invalid_argument("win_rate: unequal round counts across records");
      out.push_back(g08a_record_win_rate(r, player));
    }
  } else {
    for (const auto& r : records) out.push_back(neg_record_win_rate(r, player));
  }
  return out;
}

double win_rate(const std::vector<MatchRecord>& records, int player) {
  return mean_of(per_record_win_rate(records, player));
}

std::vector<double> per_record_survival(const std::vector<MatchRecord>& records,
                                        int player) {
  require_same_game(records, GameKind::SAG, "avg_survival_round");
  std::vector<double> out;
  for (const auto& r : records) {
    const auto survival = r.outcome.at("survival_rounds").get<std::vector<int>>();
    out.push_back(double(survival.at(player)));
  }
  return out;
}

double avg_survival_round(const std::vector<MatchRecord>& records, int player) {
  return mean_of(per_record_survival(records, player));
}

PredAccResult pred_acc(const std::vector<MatchRecord>& records, int player) {
  if (records.empty()) throw std::invalid_argument("pred_acc: no match records");
  const GameKind kind = records.front().config.game_kind;
  if (kind != GameKind::G08A && kind != GameKind::SAG)
    throw std::invalid_argument("pred_acc: defined for G0.8A and SAG records");
  require_same_game(records, kind, "pred_acc");

  PredAccResult result;
  std::vector<double> sums;   // per round index
  std::vector<int> counts;
  double total = 0;

  for (const auto& record : records) {
    for (std::size_t i = 0; i < record.rounds.size(); ++i) {
      const auto& round = record.rounds[i];
      const ActionRecord* own = nullptr;
      for (const auto& a : round.actions)
        if (a.agent == player) own = &a;
      if (own == nullptr || !own->prediction || !own->prediction->contains("summary"))
        continue;
      const double predicted = own->prediction->at("summary").get<double>();

      double actual = 0;
      if (kind == GameKind::G08A) {
        actual = round.result.at("average_value").get<double>();
      } else {
        std::int64_t best = 0;
        for (const auto& a : round.actions)
          if (a.agent != player)
            best = std::max<std::int64_t>(best, std::get<int>(a.action));
        actual = double(best);
      }
      const double dev = std::fabs(predicted - actual);
      total += dev;
      result.num_predictions += 1;
      if (sums.size() <= i) {
        sums.resize(i + 1, 0.0);
        counts.resize(i + 1, 0);
      }
      sums[i] += dev;
      counts[i] += 1;
    }
  }

  if (result.num_predictions == 0) {
    const std::string method =
        records.front().config.agents.empty()
            ? "unknown"
            : records.front().config.agents.at(player).method;
    throw std::invalid_argument("pred_acc: method '" + method +
                                "' logged no predictions");
  }
  result.mean_deviation = total / result.num_predictions;
  for (std::size_t i = 0; i < sums.size(); ++i)
    result.per_round.push_back(counts[i] > 0 ? sums[i] / counts[i] : 0.0);
  return result;
}

std::vector<double> tuning_range(const std::vector<MatchRecord>& records, int player) {
  if (records.empty()) throw std::invalid_argument("tuning_range: no match records");

  std::vector<double> sums;
  std::vector<int> counts;
  int found = 0;
  for (const auto& record : records) {
    for (std::size_t i = 0; i < record.rounds.size(); ++i) {
      for (const auto& a : record.rounds[i].actions) {
        if (a.agent != player || !a.initial_action) continue;
        if (!std::holds_alternative<int>(a.action) ||
            !std::holds_alternative<int>(*a.initial_action))
          continue;
        const double adjust =
            std::fabs(double(std::get<int>(a.action)) -
                      double(std::get<int>(*a.initial_action)));
        if (sums.size() <= i) {
          sums.resize(i + 1, 0.0);
          counts.resize(i + 1, 0);
        }
        sums[i] += adjust;
        counts[i] += 1;
        found += 1;
      }
    }
  }
  if (found == 0) {
    const std::string method =
        records.front().config.agents.empty()
            ? "unknown"
            : records.front().config.agents.at(player_index(records.front().config)).method;
    throw std::invalid_argument("tuning_range: method '" + method +
                                "' logs no initial actions");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < sums.size(); ++i)
    out.push_back(counts[i] > 0 ? sums[i] / counts[i] : 0.0);
  return out;
}

json to_json(const MetricsReport& r) {
  json j{{"game", r.game},
         {"metric", r.metric},
         {"per_repeat", r.per_repeat},
         {"mean", r.mean},
         {"stddev", r.stddev},
         {"num_tests", r.num_tests}};
  if (r.prediction_accuracy) {
    j["pred_acc"] = json{{"mean_deviation", r.prediction_accuracy->mean_deviation},
                         {"per_round", r.prediction_accuracy->per_round},
                         {"num_predictions", r.prediction_accuracy->num_predictions}};
  }
  return j;
}

MetricsReport compute_metrics(const std::vector<MatchRecord>& records, int player) {
  if (records.empty())
    throw std::invalid_argument("compute_metrics: no match records");
  MetricsReport report;
  const GameKind kind = records.front().config.game_kind;
  report.game = to_string(kind);
  report.num_tests = static_cast<int>(records.size());

  switch (kind) {
    case GameKind::G08A:
    case GameKind::NEG:
      report.metric = "win_rate";
      report.per_repeat = per_record_win_rate(records, player);
      break;
    case GameKind::SAG:
      report.metric = "avg_survival_round";
      report.per_repeat = per_record_survival(records, player);
      break;
    case GameKind::PD: {
      report.metric = "mean_payoff";
      for (const auto& r : records) {
        const auto payoffs = r.outcome.at("payoffs").get<std::vector<double>>();
        report.per_repeat.push_back(payoffs.at(player));
      }
      break;
    }
  }
  report.mean = mean_of(report.per_repeat);
  report.stddev = sample_stddev(report.per_repeat);

  if (kind == GameKind::G08A || kind == GameKind::SAG) {
    try {
      report.prediction_accuracy = pred_acc(records, player);
    } catch (const std::invalid_argument&) {
      // Method logs no predictions; leave the field empty.
    }
  }
  return report;
}

}  // namespace klr
