// Tournament harness CLI: run experiments from a declarative JSON spec,
// replay recorded runs, rebuild reports, and verify output integrity.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "klr/harness/experiment.hpp"
#include "klr/harness/reports.hpp"
#include "klr/metrics/stats.hpp"
#include "klr/opponent/model.hpp"
#include "klr/reasoning/prompts.hpp"

namespace fs = std::filesystem;
using namespace klr;

namespace {

int cmd_run(const std::string& spec_path, const std::string& mode,
            std::uint64_t seed, bool seed_set, const std::string& out,
            int parallel, bool events) {
  ExperimentSpec spec = load_experiment_spec(spec_path);
  RunOptions options;
  if (!mode.empty()) options.mode_override = backend_mode_from_string(mode);
  if (seed_set) options.seed_override = seed;
  if (!out.empty()) options.out_dir_override = out;
  options.parallel = parallel;
  options.write_round_events = events;

  const RunManifest manifest = run_experiment(spec, options);
  std::cout << "run " << (manifest.complete ? "complete" : "INCOMPLETE") << ": "
            << manifest.player_label << " vs " << manifest.opponent_label
            << " on " << manifest.game << "\n";
  std::ifstream metrics(manifest.files.at("metrics"));
  json j;
  metrics >> j;
  if (j.contains("mean"))
    std::cout << manifest.metric << " = " << j.at("mean").get<double>() << " ± "
              << j.at("stddev").get<double>() << " over "
              << j.at("num_tests").get<int>() << " tests\n";
  else
    std::cout << "no valid matches: " << j.value("detail", "") << "\n";
  for (const auto& [name, path] : manifest.files)
    std::cout << "  " << name << ": " << path << "\n";
  return manifest.complete ? 0 : 1;
}

int cmd_replay(const std::string& manifest_path, const std::string& out) {
  std::string detail;
  const bool ok = replay_verify(manifest_path, out, &detail);
  if (ok)
    std::cout << "replay OK: records are byte-identical\n";
  else
    std::cout << "replay MISMATCH: " << detail << "\n";
  return ok ? 0 : 1;
}

int cmd_report(const std::vector<std::string>& manifest_paths,
               const std::string& out_path) {
  std::vector<RunManifest> manifests;
  for (const auto& path : manifest_paths) manifests.push_back(load_manifest(path));
  const std::string csv = build_matrix_csv(manifests);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << csv;
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int cmd_depth(const std::string& records_path, double alpha,
              const std::string& anchors_path, const std::string& out_path) {
  const auto records = load_records_jsonl(records_path);
  const auto anchors = anchors_path.empty() ? human_anchors_builtin()
                                            : load_human_anchors_csv(anchors_path);
  const std::string csv = depth_report_csv(records, alpha, anchors);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << csv;
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int cmd_verify(const std::string& manifest_path) {
  std::string detail;
  const bool ok = verify_manifest(manifest_path, &detail);
  if (ok)
    std::cout << "manifest OK: all file hashes match\n";
  else
    std::cout << "manifest BROKEN: " << detail << "\n";
  return ok ? 0 : 1;
}

int cmd_dump_templates(const std::string& dir) {
  PromptCatalog::builtin().dump(dir);
  std::cout << "wrote " << PromptCatalog::builtin().all().size()
            << " templates to " << dir << "\n";
  return 0;
}

int cmd_posterior(const std::string& true_label, std::uint64_t seed, int rounds,
                  const std::string& out_path) {
  const auto true_spec = strategy_spec_from_label(true_label);
  if (!true_spec) {
    std::cerr << "unknown strategy label: " << true_label << "\n";
    return 2;
  }
  std::vector<StrategySpec> space;
  std::vector<std::string> labels;
  for (const char* label : {"0-Level (Fix)", "0-Level (Var)", "MonoTrend (Fix)",
                            "MonoTrend (Var)", "LastBids (Fix)", "LastBids (Var)"}) {
    space.push_back(*strategy_spec_from_label(label));
    labels.push_back(label);
  }
  const auto trace = concentration_trace(space, *true_spec, seed, rounds);
  const std::string csv = posterior_trace_csv(labels, trace);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << csv;
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"K-level reasoning tournament harness"};
  app.require_subcommand(1);

  // run / record (record is run with transcript capture emphasized; any
  // non-replay run captures transcripts, so it only forbids replay mode).
  std::string spec_path, mode, out;
  std::uint64_t seed = 0;
  int parallel = 0;
  bool events = false;
  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--spec", spec_path, "experiment spec JSON")->required();
    cmd->add_option("--mode", mode, "override backend mode: live|scripted|replay");
    cmd->add_option("--seed", seed, "override the experiment seed");
    cmd->add_option("--out", out, "output directory override");
    cmd->add_option("--parallel", parallel, "matches run in parallel (0 = auto)");
    cmd->add_flag("--events", events, "also stream per-round events.jsonl");
  };
  CLI::App* run = app.add_subcommand("run", "run an experiment");
  add_run_flags(run);
  CLI::App* record = app.add_subcommand(
      "record", "run and capture transcripts for later replay");
  add_run_flags(record);

  std::string manifest_path, replay_out = "replay_out";
  CLI::App* replay =
      app.add_subcommand("replay", "re-run a recorded experiment from transcripts");
  replay->add_option("--manifest", manifest_path, "manifest.json of the recorded run")
      ->required();
  replay->add_option("--out", replay_out, "directory for the replayed outputs");

  std::vector<std::string> manifest_paths;
  std::string report_out;
  CLI::App* report = app.add_subcommand("report", "combine runs into a matrix CSV");
  report->add_option("--manifests", manifest_paths, "manifest.json paths")
      ->required()
      ->expected(-1);
  report->add_option("--out", report_out, "write the CSV here (default stdout)");

  std::string records_path, anchors_path, depth_out;
  double alpha = 0.8;
  CLI::App* depth = app.add_subcommand("depth", "first-round strategic depth report");
  depth->add_option("--records", records_path, "records.jsonl")->required();
  depth->add_option("--alpha", alpha, "target coefficient (default 0.8)");
  depth->add_option("--anchors", anchors_path, "human anchors CSV");
  depth->add_option("--out", depth_out, "write the CSV here (default stdout)");

  std::string verify_path;
  CLI::App* verify = app.add_subcommand("verify", "check a manifest's file hashes");
  verify->add_option("--manifest", verify_path, "manifest.json")->required();

  std::string templates_dir = "data/prompts";
  CLI::App* dump =
      app.add_subcommand("dump-templates", "write the builtin prompt catalog");
  dump->add_option("--out", templates_dir, "target directory");

  std::string true_label = "LastBids (Fix)", posterior_out;
  std::uint64_t posterior_seed = 1;
  int posterior_rounds = 20;
  CLI::App* posterior = app.add_subcommand(
      "posterior", "trace the opponent-model posterior on synthetic play");
  posterior->add_option("--true-strategy", true_label,
                        "strategy the observed agent actually plays");
  posterior->add_option("--seed", posterior_seed, "trace seed");
  posterior->add_option("--rounds", posterior_rounds, "observations to run");
  posterior->add_option("--out", posterior_out, "write the CSV here (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(spec_path, mode, seed,
                                      run->count("--seed") > 0, out, parallel, events);
    if (record->parsed()) {
      if (mode == "replay") {
        std::cerr << "record: replay mode captures nothing new\n";
        return 2;
      }
      return cmd_run(spec_path, mode, seed, record->count("--seed") > 0, out,
                     parallel, events);
    }
    if (replay->parsed()) return cmd_replay(manifest_path, replay_out);
    if (report->parsed()) return cmd_report(manifest_paths, report_out);
    if (depth->parsed()) return cmd_depth(records_path, alpha, anchors_path, depth_out);
    if (verify->parsed()) return cmd_verify(verify_path);
    if (dump->parsed()) return cmd_dump_templates(templates_dir);
    if (posterior->parsed())
      return cmd_posterior(true_label, posterior_seed, posterior_rounds,
                           posterior_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
