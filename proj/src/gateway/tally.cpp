#include "klr/gateway/tally.hpp"

#include <cstdio>
#include <map>

namespace klr {

int player_index(const MatchConfig& config) {
  for (std::size_t i = 0; i < config.agents.size(); ++i)
    if (config.agents[i].player) return static_cast<int>(i);
  return 0;
}

std::vector<TallyRow> tally_report(const std::vector<MatchRecord>& records) {
  struct Acc {
    int tests = 0;
    std::int64_t input = 0, output = 0, rounds = 0;
  };
  std::map<std::pair<std::string, std::string>, Acc> groups;
  for (const auto& r : records) {
    const int player = player_index(r.config);
    const std::string method = r.config.agents.empty()
                                   ? "direct"
                                   : r.config.agents[player].method;
    auto& acc = groups[{to_string(r.config.game_kind), method}];
    acc.tests += 1;
    acc.input += r.usage[player].input_tokens;
    acc.output += r.usage[player].output_tokens;
    acc.rounds += static_cast<std::int64_t>(r.rounds.size());
  }

  std::vector<TallyRow> rows;
  for (const auto& [key, acc] : groups) {
    TallyRow row;
    row.game = key.first;
    row.method = key.second;
    row.num_tests = acc.tests;
    row.input_kilo = double(acc.input) / acc.tests / 1000.0;
    row.output_kilo = double(acc.output) / acc.tests / 1000.0;
    row.total_kilo = double(acc.input + acc.output) / acc.tests / 1000.0;
    row.input_per_round = acc.rounds > 0 ? double(acc.input) / double(acc.rounds) : 0;
    rows.push_back(row);
  }
  return rows;
}

std::string tally_csv(const std::vector<TallyRow>& rows) {
  std::string out = "game,method,num_tests,input_kilo,output_kilo,total_kilo\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%d,%.3f,%.3f,%.3f\n", r.game.c_str(),
                  r.method.c_str(), r.num_tests, r.input_kilo, r.output_kilo,
                  r.total_kilo);
    out += buf;
  }
  return out;
}

}  // namespace klr
