#pragma once

#include <string>
#include <vector>

#include "klr/core/match.hpp"

namespace klr {

// Average token consumption of the player seat per game test, grouped by
// (game, method). Values in kilotokens to match how cost tables are read.
struct TallyRow {
  std::string game;
  std::string method;
  int num_tests = 0;
  double input_kilo = 0;
  double output_kilo = 0;
  double total_kilo = 0;
  double input_per_round = 0;  // raw tokens, for cost-ratio checks
};

std::vector<TallyRow> tally_report(const std::vector<MatchRecord>& records);

std::string tally_csv(const std::vector<TallyRow>& rows);

// Index of the seat marked player; defaults to 0 when no flag is set.
int player_index(const MatchConfig& config);

}  // namespace klr
