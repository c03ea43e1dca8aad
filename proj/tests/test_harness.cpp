#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "klr/gateway/scripted.hpp"
#include "klr/harness/experiment.hpp"
#include "klr/harness/reports.hpp"
#include "klr/reasoning/prompts.hpp"

using namespace klr;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "klr_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentSpec small_g08a_spec(const std::string& out_dir) {
  ExperimentSpec spec;
  spec.game = GameKind::G08A;
  spec.player.method = "kr";
  spec.player.k = 2;
  spec.player.backend = "scripted";
  spec.opponent.method = "0-Level (Fix)";
  spec.num_opponents = 4;
  spec.repeats = 3;
  spec.rounds = 5;
  spec.seed = 11;
  BackendSpec backend;
  backend.script_id = "prev_target";
  spec.backends["scripted"] = backend;
  spec.out_dir = out_dir;
  return spec;
}

}  // namespace

TEST_CASE("spec json: defaults and validation") {
  const json j{{"game", "neg"}};
  const ExperimentSpec spec = experiment_spec_from_json(j);
  CHECK(spec.num_opponents == 1);
  CHECK(spec.rounds == 20);  // NEG is turn-capped at 20 by default
  CHECK(spec.backends.count("scripted") == 1);

  json bad{{"game", "g08a"},
           {"player", {{"method", "direct"}, {"backend", "missing"}}}};
  CHECK_THROWS_AS(experiment_spec_from_json(bad).validate(), std::invalid_argument);

  json bad_replay{{"game", "g08a"},
                  {"backends",
                   {{"scripted",
                     {{"mode", "replay"}, {"transcript_path", "/no/such/file.jsonl"}}}}}};
  CHECK_THROWS_AS(experiment_spec_from_json(bad_replay).validate(),
                  std::invalid_argument);
}

TEST_CASE("run_experiment: files, metrics and manifest for a scripted run") {
  const fs::path dir = temp_dir("run_basic");
  const ExperimentSpec spec = small_g08a_spec(dir.string());
  const RunManifest manifest = run_experiment(spec);

  CHECK(manifest.complete);
  CHECK(manifest.metric == "win_rate");
  CHECK(manifest.player_label == "K-R");
  CHECK(manifest.opponent_label == "0-Level (Fix)");
  CHECK(manifest.match_seeds.size() == 3);
  for (const char* name : {"records", "transcripts", "metrics", "spec", "matrix",
                           "depth", "tally"})
    CHECK(fs::exists(manifest.files.at(name)));

  const auto records = load_records_jsonl(manifest.files.at("records"));
  REQUIRE(records.size() == 3);
  CHECK(records[0].rounds.size() == 5);

  // Written manifest verifies.
  std::string detail;
  CHECK_MESSAGE(verify_manifest((dir / "manifest.json").string(), &detail), detail);
}

TEST_CASE("run_experiment: byte-identical outputs for identical specs") {
  const fs::path d1 = temp_dir("det_a");
  const fs::path d2 = temp_dir("det_b");
  ExperimentSpec s1 = small_g08a_spec(d1.string());
  ExperimentSpec s2 = small_g08a_spec(d2.string());
  run_experiment(s1);
  run_experiment(s2);
  CHECK(slurp((d1 / "records.jsonl").string()) ==
        slurp((d2 / "records.jsonl").string()));
  CHECK(slurp((d1 / "matrix.csv").string()) == slurp((d2 / "matrix.csv").string()));
  CHECK(slurp((d1 / "transcripts.jsonl").string()) ==
        slurp((d2 / "transcripts.jsonl").string()));
}

TEST_CASE("run_experiment: parallel execution matches serial bytes") {
  const fs::path serial_dir = temp_dir("par_serial");
  const fs::path parallel_dir = temp_dir("par_parallel");
  ExperimentSpec spec = small_g08a_spec(serial_dir.string());
  RunOptions serial;
  serial.parallel = 1;
  run_experiment(spec, serial);

  spec.out_dir = parallel_dir.string();
  RunOptions parallel;
  parallel.parallel = 4;
  run_experiment(spec, parallel);

  CHECK(slurp((serial_dir / "records.jsonl").string()) ==
        slurp((parallel_dir / "records.jsonl").string()));
  CHECK(slurp((serial_dir / "transcripts.jsonl").string()) ==
        slurp((parallel_dir / "transcripts.jsonl").string()));
}

TEST_CASE("golden records: the shipped demo spec reproduces bit-for-bit") {
  const fs::path source_dir = KLR_SOURCE_DIR;
  ExperimentSpec spec = load_experiment_spec(
      (source_dir / "specs" / "g08a_kr_vs_zerolevel.json").string());
  const fs::path dir = temp_dir("golden");
  RunOptions options;
  options.out_dir_override = dir.string();
  run_experiment(spec, options);
  CHECK(slurp((dir / "records.jsonl").string()) ==
        slurp((source_dir / "tests" / "golden" / "g08a_records.jsonl").string()));
}

TEST_CASE("verify_manifest: detects tampering") {
  const fs::path dir = temp_dir("tamper");
  const ExperimentSpec spec = small_g08a_spec(dir.string());
  run_experiment(spec);

  std::ofstream out(dir / "records.jsonl", std::ios::app);
  out << "\n";
  out.close();
  std::string detail;
  CHECK_FALSE(verify_manifest((dir / "manifest.json").string(), &detail));
  CHECK(detail.find("records") != std::string::npos);
}

TEST_CASE("replay_verify: recorded scripted run replays identically") {
  const fs::path dir = temp_dir("replay_src");
  const ExperimentSpec spec = small_g08a_spec(dir.string());
  run_experiment(spec);

  const fs::path replay_dir = temp_dir("replay_dst");
  std::string detail;
  CHECK_MESSAGE(replay_verify((dir / "manifest.json").string(),
                              replay_dir.string(), &detail),
                detail);
}

TEST_CASE("build_matrix: single cell and a 2x2 grid") {
  const fs::path dir = temp_dir("matrix");
  std::vector<RunManifest> manifests;
  int idx = 0;
  for (const char* player : {"direct", "kr"}) {
    for (const char* opponent : {"0-Level (Fix)", "LastBids (Fix)"}) {
      ExperimentSpec spec = small_g08a_spec((dir / std::to_string(idx++)).string());
      spec.player.method = player;
      spec.opponent.method = opponent;
      manifests.push_back(run_experiment(spec));
    }
  }
  const std::string csv = build_matrix_csv(manifests);
  CHECK(csv.find("opponent,Direct,K-R") != std::string::npos);
  CHECK(csv.find("0-Level (Fix),") != std::string::npos);
  CHECK(csv.find("LastBids (Fix),") != std::string::npos);
  CHECK(csv.find("Average,") != std::string::npos);

  const std::string single = build_matrix_csv({manifests[0]});
  CHECK(single.find("opponent,Direct") != std::string::npos);

  // Mixed games are rejected.
  RunManifest sag = manifests[0];
  sag.game = "sag";
  CHECK_THROWS_AS(build_matrix_csv({manifests[0], sag}), std::invalid_argument);
}

TEST_CASE("depth report: all-40 first round gives depth 1 at alpha 0.8") {
  const fs::path dir = temp_dir("depth");
  ExperimentSpec spec = small_g08a_spec(dir.string());
  spec.player.method = "direct";
  spec.backends["scripted"].script_id = "echo40";
  run_experiment(spec);
  const std::string csv = slurp((dir / "depth.csv").string());
  CHECK(csv.find("llm,\"Direct\",40.0000,0.8000,1.0000") != std::string::npos);
  // Human anchor rows ride along.
  CHECK(csv.find("human,\"Lab\",35.1300,0.6667,0.8705") != std::string::npos);
  CHECK(csv.find("human,\"Newspaper\",23.0800,0.6667,1.9066") != std::string::npos);
}

TEST_CASE("depth report: empty record set yields only the header and anchors") {
  const std::string csv = depth_report_csv({}, 0.8, {});
  CHECK(csv == "group,label,mean_choice,alpha,strategic_depth\n");
}

TEST_CASE("shipped data files stay in sync with the builtin constants") {
  const fs::path source_dir = KLR_SOURCE_DIR;

  const auto anchors =
      load_human_anchors_csv((source_dir / "data" / "human_anchors.csv").string());
  const auto& builtin = human_anchors_builtin();
  REQUIRE(anchors.size() == builtin.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    CHECK(anchors[i].label == builtin[i].label);
    CHECK(anchors[i].mean_choice == doctest::Approx(builtin[i].mean_choice));
  }

  PromptCatalog from_files;
  from_files.load_overrides((source_dir / "data" / "prompts").string());
  for (const auto& [key, text] : PromptCatalog::builtin().all()) {
    REQUIRE(from_files.all().count(key) == 1);
    CHECK_MESSAGE(from_files.all().at(key) == text, "template drift: ", key);
  }
}

TEST_CASE("human anchors: builtin constants round-trip through CSV") {
  const fs::path dir = temp_dir("anchors");
  const fs::path path = dir / "anchors.csv";
  std::ofstream out(path);
  out << human_anchors_csv();
  out.close();
  const auto anchors = load_human_anchors_csv(path.string());
  REQUIRE(anchors.size() == human_anchors_builtin().size());
  CHECK(anchors[0].label == "Lab");
  CHECK(anchors[0].mean_choice == doctest::Approx(35.13));
}

TEST_CASE("SAG pcot player vs direct opponents: pred_acc lands, replay holds") {
  const fs::path dir = temp_dir("sag_pcot");
  ExperimentSpec spec;
  spec.game = GameKind::SAG;
  spec.player = {"pcot", "pred_backend", 2, json::object()};
  spec.opponent = {"direct", "bid_backend", 2, json::object()};
  spec.num_opponents = 3;
  spec.repeats = 2;
  spec.rounds = 6;
  spec.seed = 21;
  BackendSpec pred_backend;
  pred_backend.script_id = "fixed:Prediction: 120\nAction: 50";
  BackendSpec bid_backend;
  bid_backend.script_id = "sag_modest";
  spec.backends["pred_backend"] = pred_backend;
  spec.backends["bid_backend"] = bid_backend;
  spec.out_dir = dir.string();

  const RunManifest manifest = run_experiment(spec);
  std::ifstream in(manifest.files.at("metrics"));
  json metrics;
  in >> metrics;
  REQUIRE(metrics.contains("pred_acc"));
  // Opponents bid 20 + 10*dry_streak; day 1 the max opponent bid is 20.
  CHECK(metrics.at("pred_acc").at("per_round").at(0).get<double>() ==
        doctest::Approx(100.0));

  const fs::path replay_dir = temp_dir("sag_pcot_replay");
  std::string detail;
  CHECK_MESSAGE(replay_verify((dir / "manifest.json").string(),
                              replay_dir.string(), &detail),
                detail);
}

TEST_CASE("run_experiment: a crashing match is kept as an invalid stub") {
  ScriptRegistry::instance().register_script(
      "always_raise",
      [](const PromptContext&) -> std::string { throw std::runtime_error("boom"); });
  const fs::path dir = temp_dir("partial");
  ExperimentSpec spec = small_g08a_spec(dir.string());
  spec.player.method = "direct";
  spec.backends["scripted"].script_id = "always_raise";
  spec.backends["scripted"].retry.max_attempts = 1;
  spec.repeats = 2;

  const RunManifest manifest = run_experiment(spec);
  CHECK_FALSE(manifest.complete);
  const auto records = load_records_jsonl(manifest.files.at("records"));
  REQUIRE(records.size() == 2);
  CHECK_FALSE(records[0].valid);
  CHECK(records[0].abort_reason.find("boom") != std::string::npos);
  const std::string metrics = slurp(manifest.files.at("metrics"));
  CHECK(metrics.find("no valid matches") != std::string::npos);
}

TEST_CASE("run_experiment: live mode without the auth variable fails up front") {
  const fs::path dir = temp_dir("live_noauth");
  ExperimentSpec spec = small_g08a_spec(dir.string());
  spec.backends["scripted"].mode = BackendMode::Live;
  spec.backends["scripted"].endpoint = "https://example.test";
  spec.backends["scripted"].model = "m";
  spec.backends["scripted"].auth_env = "KLR_TEST_NO_SUCH_KEY";
  CHECK_THROWS_WITH_AS(run_experiment(spec),
                       doctest::Contains("KLR_TEST_NO_SUCH_KEY"),
                       std::runtime_error);
}

TEST_CASE("NEG experiment: positions swap across repeats") {
  const fs::path dir = temp_dir("neg_swap");
  ExperimentSpec spec;
  spec.game = GameKind::NEG;
  spec.player.method = "direct";
  spec.opponent.method = "direct";
  spec.num_opponents = 1;
  spec.repeats = 2;
  spec.rounds = 6;
  spec.seed = 3;
  BackendSpec backend;
  backend.script_id = "neg_concede";
  spec.backends["scripted"] = backend;
  spec.out_dir = dir.string();

  const RunManifest manifest = run_experiment(spec);
  const auto records = load_records_jsonl(manifest.files.at("records"));
  REQUIRE(records.size() == 2);
  CHECK(records[0].config.game_params.at("first_mover").get<int>() == 0);
  CHECK(records[1].config.game_params.at("first_mover").get<int>() == 1);
  CHECK(records[0].rounds[0].actions[0].agent == 0);
  CHECK(records[1].rounds[0].actions[0].agent == 1);
}
