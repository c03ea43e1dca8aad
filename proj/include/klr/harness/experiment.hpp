#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "klr/core/match.hpp"
#include "klr/gateway/backend.hpp"
#include "klr/metrics/stats.hpp"

namespace klr {

inline constexpr const char* kArtifactVersion = "0.1.0";

// How one side of the table is driven: a reasoning method over a named
// backend, or a programmatic strategy label.
struct MethodChoice {
  std::string method = "direct";  // reasoning method or strategy label
  std::string backend = "scripted";
  int k = 2;
  json params = json::object();

  std::string display_label() const;
};

json to_json(const MethodChoice& m);
MethodChoice method_choice_from_json(const json& j);

struct ExperimentSpec {
  GameKind game = GameKind::G08A;
  MethodChoice player;
  MethodChoice opponent;   // uniform across all opponent seats
  int num_opponents = 4;
  int repeats = 10;
  int rounds = 10;
  std::uint64_t seed = 1;
  std::map<std::string, BackendSpec> backends;
  SamplingParams sampling;
  json game_params = json::object();
  std::string out_dir = "out";

  void validate() const;
  int num_agents() const { return num_opponents + 1; }
};

json to_json(const ExperimentSpec& s);
ExperimentSpec experiment_spec_from_json(const json& j);
ExperimentSpec load_experiment_spec(const std::string& path);

struct RunOptions {
  std::optional<BackendMode> mode_override;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_dir_override;
  int parallel = 0;          // 0 = auto (repeats for offline modes, 1 for live)
  bool write_round_events = false;
};

struct RunManifest {
  std::string artifact_version = kArtifactVersion;
  std::uint64_t spec_hash = 0;
  std::string game;
  std::string metric;
  std::string player_label;
  std::string opponent_label;
  std::vector<std::uint64_t> match_seeds;
  std::map<std::string, std::string> files;            // name -> path
  std::map<std::string, std::uint64_t> file_hashes;    // name -> fnv1a64
  bool complete = false;
};

json to_json(const RunManifest& m);
RunManifest manifest_from_json(const json& j);
RunManifest load_manifest(const std::string& path);

// Executes repeats x matches, persists records/transcripts/reports under the
// output directory and returns the manifest (also written there).
RunManifest run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

// Re-runs a recorded experiment through replay backends and reports whether
// the records file came out byte-identical.
bool replay_verify(const std::string& manifest_path, const std::string& out_dir,
                   std::string* detail = nullptr);

// Rehashes every file listed in the manifest.
bool verify_manifest(const std::string& manifest_path, std::string* detail = nullptr);

std::vector<MatchRecord> load_records_jsonl(const std::string& path);

std::uint64_t hash_file(const std::string& path);

}  // namespace klr
