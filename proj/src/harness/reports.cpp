#include "klr/harness/reports.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "klr/gateway/tally.hpp"
#include "klr/metrics/stats.hpp"

namespace klr {

const std::vector<std::string> kCanonicalMethodOrder = {
    "Direct", "CoT", "Persona", "Reflect", "Refine", "PCoT", "K-R"};

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

int method_rank(const std::string& label) {
  for (std::size_t i = 0; i < kCanonicalMethodOrder.size(); ++i)
    if (label == kCanonicalMethodOrder[i]) return static_cast<int>(i);
  return static_cast<int>(kCanonicalMethodOrder.size());
}

bool method_less(const std::string& a, const std::string& b) {
  const int ra = method_rank(a), rb = method_rank(b);
  if (ra != rb) return ra < rb;
  return a < b;
}

}  // namespace

std::string build_matrix_csv(const std::vector<RunManifest>& manifests) {
  if (manifests.empty()) throw std::invalid_argument("build_matrix: no manifests");
  const std::string game = manifests.front().game;
  const std::string metric = manifests.front().metric;
  for (const auto& m : manifests) {
    if (m.game != game)
      throw std::invalid_argument("build_matrix: mixed games in manifest set");
    if (m.metric != metric)
      throw std::invalid_argument("build_matrix: mixed metrics in manifest set");
  }

  struct Cell {
    double mean = 0, stddev = 0;
    bool present = false;
  };
  std::vector<std::string> players, opponents;
  std::map<std::pair<std::string, std::string>, Cell> cells;
  for (const auto& m : manifests) {
    std::ifstream in(m.files.at("metrics"));
    if (!in)
      throw std::runtime_error("build_matrix: cannot open " + m.files.at("metrics"));
    json j;
    in >> j;
    Cell cell;
    cell.mean = j.at("mean").get<double>();
    cell.stddev = j.at("stddev").get<double>();
    cell.present = true;
    cells[{m.opponent_label, m.player_label}] = cell;
    if (std::find(players.begin(), players.end(), m.player_label) == players.end())
      players.push_back(m.player_label);
    if (std::find(opponents.begin(), opponents.end(), m.opponent_label) ==
        opponents.end())
      opponents.push_back(m.opponent_label);
  }
  std::sort(players.begin(), players.end(), method_less);
  std::sort(opponents.begin(), opponents.end(), method_less);

  std::string out = "# game=" + game + " metric=" + metric + "\nopponent";
  for (const auto& p : players) out += "," + p;
  out += "\n";
  for (const auto& o : opponents) {
    out += o;
    for (const auto& p : players) {
      const auto it = cells.find({o, p});
      out += ",";
      if (it != cells.end() && it->second.present)
        out += fmt(it->second.mean) + "±" + fmt(it->second.stddev);
    }
    out += "\n";
  }

  out += "Average";
  for (const auto& p : players) {
    std::vector<double> means;
    for (const auto& o : opponents) {
      const auto it = cells.find({o, p});
      if (it != cells.end()) means.push_back(it->second.mean);
    }
    out += ",";
    if (!means.empty())
      out += fmt(mean_of(means)) + "±" + fmt(sample_stddev(means));
  }
  out += "\n";
  return out;
}

const std::vector<HumanAnchor>& human_anchors_builtin() {
  static const std::vector<HumanAnchor> anchors = {
      {"Lab", 35.13},           {"Classroom", 26.84}, {"Take-home", 25.20},
      {"Theorists", 17.15},     {"Internet Newsgroup", 22.16},
      {"Newspaper", 23.08},
  };
  return anchors;
}

std::string human_anchors_csv() {
  std::string out = "label,mean_choice,alpha\n";
  for (const auto& a : human_anchors_builtin())
    out += "\"" + a.label + "\"," + fmt(a.mean_choice) + ",0.6667\n";
  return out;
}

std::vector<HumanAnchor> load_human_anchors_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open anchors file: " + path);
  std::vector<HumanAnchor> anchors;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    HumanAnchor a;
    std::size_t pos = 0;
    if (line.front() == '"') {
      pos = line.find('"', 1);
      a.label = line.substr(1, pos - 1);
      pos += 2;  // skip quote and comma
    } else {
      pos = line.find(',');
      a.label = line.substr(0, pos);
      pos += 1;
    }
    a.mean_choice = std::stod(line.substr(pos));
    anchors.push_back(a);
  }
  return anchors;
}

std::string depth_report_csv(const std::vector<MatchRecord>& records, double alpha,
                             const std::vector<HumanAnchor>& anchors) {
  // First-round choice of the player seat, grouped by method label.
  std::map<std::string, std::pair<double, int>> sums;
  for (const auto& record : records) {
    if (record.rounds.empty() || record.config.game_kind != GameKind::G08A)
      continue;
    const int player = player_index(record.config);
    MethodChoice choice;
    choice.method = record.config.agents.at(player).method;
    choice.k = record.config.agents.at(player).k;
    for (const auto& a : record.rounds.front().actions) {
      if (a.agent != player || !std::holds_alternative<int>(a.action)) continue;
      auto& acc = sums[choice.display_label()];
      acc.first += std::get<int>(a.action);
      acc.second += 1;
    }
  }

  std::string out = "group,label,mean_choice,alpha,strategic_depth\n";
  for (const auto& [label, acc] : sums) {
    const double mean = acc.first / acc.second;
    out += "llm,\"" + label + "\"," + fmt(mean) + "," + fmt(alpha) + "," +
           fmt(strategic_depth(mean, alpha)) + "\n";
  }
  for (const auto& a : anchors) {
    const double anchor_alpha = 2.0 / 3.0;
    out += "human,\"" + a.label + "\"," + fmt(a.mean_choice) + "," +
           fmt(anchor_alpha) + "," +
           fmt(strategic_depth(a.mean_choice, anchor_alpha)) + "\n";
  }
  return out;
}

}  // namespace klr
