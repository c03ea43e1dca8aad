#pragma once

#include <string>
#include <vector>

#include "klr/harness/experiment.hpp"

namespace klr {

// Player-method columns in the order the result tables use.
extern const std::vector<std::string> kCanonicalMethodOrder;

// Mean +- std matrix, rows = opponent method, columns = player method, with
// a trailing Average row. All manifests must share game and metric.
std::string build_matrix_csv(const std::vector<RunManifest>& manifests);

struct HumanAnchor {
  std::string label;
  double mean_choice = 0;
};

// Reference constants reported for human groups (alpha = 2/3 settings).
const std::vector<HumanAnchor>& human_anchors_builtin();
std::vector<HumanAnchor> load_human_anchors_csv(const std::string& path);
std::string human_anchors_csv();

// First-round mean choice and strategic depth per player method, with the
// human anchor rows appended for comparison.
std::string depth_report_csv(const std::vector<MatchRecord>& records, double alpha,
                             const std::vector<HumanAnchor>& anchors);

}  // namespace klr
