#include "klr/harness/experiment.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include "klr/gateway/replay.hpp"
#include "klr/gateway/tally.hpp"
#include "klr/harness/reports.hpp"
#include "klr/reasoning/pipelines.hpp"
#include "klr/strategies/strategies.hpp"

namespace klr {

namespace fs = std::filesystem;

std::string MethodChoice::display_label() const {
  if (is_strategy_label(method)) return method;
  if (method == "direct") return "Direct";
  if (method == "cot") return "CoT";
  if (method == "persona") return "Persona";
  if (method == "reflect") return "Reflect";
  if (method == "refine") return "Refine";
  if (method == "pcot") return "PCoT";
  if (method == "kr") return k == 2 ? "K-R" : "K-R[k=" + std::to_string(k) + "]";
  return method;
}

json to_json(const MethodChoice& m) {
  json j{{"method", m.method}, {"backend", m.backend}, {"k", m.k}};
  if (!m.params.empty()) j["params"] = m.params;
  return j;
}

MethodChoice method_choice_from_json(const json& j) {
  MethodChoice m;
  if (j.is_string()) {
    m.method = j.get<std::string>();
    return m;
  }
  m.method = j.value("method", "direct");
  m.backend = j.value("backend", "scripted");
  m.k = j.value("k", 2);
  m.params = j.value("params", json::object());
  return m;
}

void ExperimentSpec::validate() const {
  if (repeats < 1) throw std::invalid_argument("spec: repeats must be >= 1");
  if (rounds < 1) throw std::invalid_argument("spec: rounds must be >= 1");
  if (num_opponents < 1) throw std::invalid_argument("spec: need at least one opponent");
  if ((game == GameKind::NEG || game == GameKind::PD) && num_opponents != 1)
    throw std::invalid_argument("spec: two-agent game needs exactly one opponent");

  for (const MethodChoice* choice : {&player, &opponent}) {
    if (is_strategy_label(choice->method)) continue;
    if (!is_reasoning_method(choice->method))
      throw std::invalid_argument("spec: unknown method " + choice->method);
    const auto it = backends.find(choice->backend);
    if (it == backends.end())
      throw std::invalid_argument("spec: method references unknown backend '" +
                                  choice->backend + "'");
    it->second.validate();
    if (it->second.mode == BackendMode::Replay &&
        !fs::exists(it->second.transcript_path))
      throw std::invalid_argument("spec: replay transcript missing: " +
                                  it->second.transcript_path);
  }
}

json to_json(const ExperimentSpec& s) {
  json backends = json::object();
  for (const auto& [name, b] : s.backends) backends[name] = to_json(b);
  return json{{"game", to_string(s.game)},
              {"player", to_json(s.player)},
              {"opponent", to_json(s.opponent)},
              {"num_opponents", s.num_opponents},
              {"repeats", s.repeats},
              {"rounds", s.rounds},
              {"seed", s.seed},
              {"backends", backends},
              {"sampling", to_json(s.sampling)},
              {"game_params", s.game_params},
              {"out_dir", s.out_dir}};
}

ExperimentSpec experiment_spec_from_json(const json& j) {
  ExperimentSpec s;
  s.game = game_kind_from_string(j.at("game").get<std::string>());
  if (j.contains("player")) s.player = method_choice_from_json(j.at("player"));
  if (j.contains("opponent")) s.opponent = method_choice_from_json(j.at("opponent"));
  s.num_opponents =
      j.value("num_opponents",
              (s.game == GameKind::NEG || s.game == GameKind::PD) ? 1 : 4);
  s.repeats = j.value("repeats", 10);
  // NEG is turn-based; its default cap is 20 moves.
  s.rounds = j.value("rounds", s.game == GameKind::NEG ? 20 : 10);
  s.seed = j.value("seed", std::uint64_t(1));
  if (j.contains("backends"))
    for (const auto& [name, b] : j.at("backends").items())
      s.backends[name] = backend_spec_from_json(b);
  if (s.backends.empty()) s.backends["scripted"] = BackendSpec{};
  if (j.contains("sampling")) s.sampling = sampling_from_json(j.at("sampling"));
  s.game_params = j.value("game_params", json::object());
  s.out_dir = j.value("out_dir", "out");
  return s;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec: " + path);
  json j;
  in >> j;
  ExperimentSpec spec = experiment_spec_from_json(j);
  spec.validate();
  return spec;
}

json to_json(const RunManifest& m) {
  json files = json::object();
  json hashes = json::object();
  for (const auto& [name, path] : m.files) files[name] = path;
  for (const auto& [name, h] : m.file_hashes) hashes[name] = h;
  return json{{"artifact_version", m.artifact_version},
              {"spec_hash", m.spec_hash},
              {"game", m.game},
              {"metric", m.metric},
              {"player_label", m.player_label},
              {"opponent_label", m.opponent_label},
              {"match_seeds", m.match_seeds},
              {"files", files},
              {"file_hashes", hashes},
              {"complete", m.complete}};
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  m.artifact_version = j.value("artifact_version", "");
  m.spec_hash = j.at("spec_hash").get<std::uint64_t>();
  m.game = j.at("game").get<std::string>();
  m.metric = j.at("metric").get<std::string>();
  m.player_label = j.at("player_label").get<std::string>();
  m.opponent_label = j.at("opponent_label").get<std::string>();
  m.match_seeds = j.at("match_seeds").get<std::vector<std::uint64_t>>();
  for (const auto& [name, path] : j.at("files").items())
    m.files[name] = path.get<std::string>();
  for (const auto& [name, h] : j.at("file_hashes").items())
    m.file_hashes[name] = h.get<std::uint64_t>();
  m.complete = j.at("complete").get<bool>();
  return m;
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  json j;
  in >> j;
  return manifest_from_json(j);
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file for hashing: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return fnv1a64(ss.str());
}

std::vector<MatchRecord> load_records_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open records: " + path);
  std::vector<MatchRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(match_record_from_json(json::parse(line)));
  }
  return records;
}

namespace {

struct MatchOutput {
  MatchRecord record;
  std::vector<TranscriptRecord> transcript;
  std::string events;  // per-round JSON lines, filled on request
};

std::string metric_name_for(GameKind game) {
  switch (game) {
    case GameKind::G08A:
    case GameKind::NEG: return "win_rate";
    case GameKind::SAG: return "avg_survival_round";
    case GameKind::PD: return "mean_payoff";
  }
  return "win_rate";
}

std::shared_ptr<Decider> make_seat_decider(const MethodChoice& choice,
                                           std::shared_ptr<DecisionBackend> backend) {
  if (const auto strategy = strategy_spec_from_label(choice.method))
    return std::make_shared<StrategyDecider>(*strategy);
  return make_reasoning_decider(choice.method, std::move(backend), nullptr,
                                choice.k, choice.params);
}

MatchOutput run_one_match(const ExperimentSpec& spec, int repeat,
                          std::uint64_t match_seed,
                          const std::optional<BackendMode>& mode_override,
                          const std::map<int, std::vector<TranscriptRecord>>*
                              replay_streams,
                          bool stream_events) {
  MatchConfig config;
  config.game_kind = spec.game;
  config.num_agents = spec.num_agents();
  config.max_rounds = spec.rounds;
  config.seed = match_seed;
  config.sampling = spec.sampling;
  config.game_params = spec.game_params;
  if (spec.game == GameKind::NEG && !config.game_params.contains("first_mover"))
    config.game_params["first_mover"] = repeat % 2;  // swap positions per repeat

  std::vector<std::shared_ptr<Decider>> deciders;
  std::vector<std::shared_ptr<DecisionBackend>> backends;
  for (int seat = 0; seat < config.num_agents; ++seat) {
    const MethodChoice& choice = seat == 0 ? spec.player : spec.opponent;
    AgentSpec agent;
    agent.method = choice.method;
    agent.backend = choice.backend;
    agent.k = choice.k;
    agent.player = seat == 0;
    agent.params = choice.params;
    config.agents.push_back(agent);

    std::shared_ptr<DecisionBackend> backend;
    if (!is_strategy_label(choice.method)) {
      BackendSpec bspec = spec.backends.at(choice.backend);
      if (mode_override) bspec.mode = *mode_override;
      bspec.sampling = spec.sampling;
      if (bspec.mode == BackendMode::Replay) {
        std::vector<TranscriptRecord> slice;
        if (replay_streams != nullptr && replay_streams->count(seat) > 0)
          slice = replay_streams->at(seat);
        bspec.transcript_path = "(run-internal)";
        backend = std::make_shared<ReplayBackend>(bspec, std::move(slice));
      } else {
        backend = std::shared_ptr<DecisionBackend>(make_backend(bspec));
      }
      backends.push_back(backend);
    }
    deciders.push_back(make_seat_decider(choice, backend));
  }

  auto engine = make_engine(spec.game);
  MatchOutput out;
  RoundSink sink;
  if (stream_events) {
    sink = [&out, repeat](const RoundLog& log) {
      json actions = json::array();
      for (const auto& a : log.actions) actions.push_back(to_json(a));
      out.events += json{{"match", repeat},
                         {"round", log.env.round},
                         {"env", to_json(log.env)},
                         {"actions", actions},
                         {"result", log.result}}
                        .dump() +
                    "\n";
    };
  }
  out.record = run_match(config, *engine, deciders, sink);
  for (auto& backend : backends) {
    auto transcript = backend->take_transcript();
    out.transcript.insert(out.transcript.end(),
                          std::make_move_iterator(transcript.begin()),
                          std::make_move_iterator(transcript.end()));
  }
  return out;
}

}  // namespace

RunManifest run_experiment(const ExperimentSpec& spec_in, const RunOptions& options) {
  ExperimentSpec spec = spec_in;
  if (options.seed_override) spec.seed = *options.seed_override;
  if (options.out_dir_override) spec.out_dir = *options.out_dir_override;
  spec.validate();

  const bool live = options.mode_override
                        ? *options.mode_override == BackendMode::Live
                        : std::any_of(spec.backends.begin(), spec.backends.end(),
                                      [](const auto& kv) {
                                        return kv.second.mode == BackendMode::Live;
                                      });
  if (live) {
    // Fail before any match starts, not on the first request.
    for (const auto& [name, b] : spec.backends) {
      const BackendMode mode = options.mode_override.value_or(b.mode);
      if (mode != BackendMode::Live) continue;
      const char* key = std::getenv(b.auth_env.c_str());
      if (key == nullptr || *key == '\0')
        throw std::runtime_error("backend '" + name + "': environment variable " +
                                 b.auth_env + " is not set");
    }
  }
  int parallel = options.parallel;
  if (parallel <= 0) parallel = live ? 1 : spec.repeats;

  // Replay input: transcripts sliced per (match, seat).
  std::map<int, std::map<int, std::vector<TranscriptRecord>>> replay_streams;
  const bool replaying =
      options.mode_override && *options.mode_override == BackendMode::Replay;
  if (replaying) {
    std::string path;
    for (const auto& [name, b] : spec.backends)
      if (!b.transcript_path.empty()) path = b.transcript_path;
    if (path.empty())
      throw std::invalid_argument("replay requested but no transcript path in spec");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open transcript: " + path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      const int match = j.value("match", 0);
      TranscriptRecord rec = transcript_record_from_json(j);
      replay_streams[match][rec.agent].push_back(std::move(rec));
    }
  }

  std::vector<std::uint64_t> seeds;
  for (int r = 0; r < spec.repeats; ++r)
    seeds.push_back(derive_seed(spec.seed, 0x52554e53ULL, r));

  std::vector<MatchOutput> outputs(spec.repeats);
  auto worker = [&](int r) -> MatchOutput {
    try {
      return run_one_match(spec, r, seeds[r], options.mode_override,
                           replaying ? &replay_streams[r] : nullptr,
                           options.write_round_events);
    } catch (const std::exception& e) {
      // Keep the completed matches; this one becomes an invalid stub.
      MatchOutput failed;
      failed.record.config.game_kind = spec.game;
      failed.record.config.num_agents = spec.num_agents();
      failed.record.config.max_rounds = spec.rounds;
      failed.record.config.seed = seeds[r];
      failed.record.usage.assign(spec.num_agents(), Usage{});
      failed.record.valid = false;
      failed.record.abort_reason = e.what();
      failed.record.outcome = json{{"aborted", true}};
      return failed;
    }
  };
  if (parallel <= 1) {
    for (int r = 0; r < spec.repeats; ++r) outputs[r] = worker(r);
  } else {
    std::vector<std::future<MatchOutput>> futures;
    for (int r = 0; r < spec.repeats; ++r)
      futures.push_back(std::async(std::launch::async, worker, r));
    for (int r = 0; r < spec.repeats; ++r) outputs[r] = futures[r].get();
  }

  fs::create_directories(spec.out_dir);
  RunManifest manifest;
  manifest.spec_hash = fnv1a64(to_json(spec).dump());
  manifest.game = to_string(spec.game);
  manifest.player_label = spec.player.display_label();
  manifest.opponent_label = spec.opponent.display_label();
  manifest.match_seeds = seeds;

  std::vector<MatchRecord> records, valid_records;
  bool all_valid = true;
  for (const auto& o : outputs) {
    records.push_back(o.record);
    all_valid = all_valid && o.record.valid;
    if (o.record.valid) valid_records.push_back(o.record);
  }

  auto write_file = [&](const std::string& name, const std::string& filename,
                        const std::string& content) {
    const fs::path path = fs::path(spec.out_dir) / filename;
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    manifest.files[name] = path.string();
    manifest.file_hashes[name] = fnv1a64(content);
  };

  {
    std::string content;
    for (const auto& r : records) content += canonical_json(r) + "\n";
    write_file("records", "records.jsonl", content);
  }
  {
    std::string content;
    for (int r = 0; r < spec.repeats; ++r) {
      for (const auto& t : outputs[r].transcript) {
        json j = to_json(t);
        j["match"] = r;
        content += j.dump() + "\n";
      }
    }
    write_file("transcripts", "transcripts.jsonl", content);
  }
  if (options.write_round_events) {
    std::string content;
    for (int r = 0; r < spec.repeats; ++r) content += outputs[r].events;
    write_file("events", "events.jsonl", content);
  }

  if (valid_records.empty()) {
    manifest.metric = metric_name_for(spec.game);
    const std::string reason =
        records.empty() ? "no matches ran" : records.front().abort_reason;
    write_file("metrics", "metrics.json",
               json{{"error", "no valid matches"}, {"detail", reason}}.dump(2) + "\n");
  } else {
    const MetricsReport metrics = compute_metrics(valid_records, 0);
    manifest.metric = metrics.metric;
    write_file("metrics", "metrics.json", to_json(metrics).dump(2) + "\n");
  }
  write_file("spec", "spec.json", to_json(spec).dump(2) + "\n");
  write_file("tally", "tally.csv", tally_csv(tally_report(valid_records)));

  manifest.complete = all_valid;
  if (!valid_records.empty()) {
    // The matrix of a single run is its own 1x1 cell.
    RunManifest self = manifest;
    self.files["metrics"] = manifest.files.at("metrics");
    write_file("matrix", "matrix.csv", build_matrix_csv({self}));
    if (spec.game == GameKind::G08A) {
      const double alpha = spec.game_params.value("alpha", 0.8);
      write_file("depth", "depth.csv",
                 depth_report_csv(valid_records, alpha, human_anchors_builtin()));
    }
  }

  const fs::path manifest_path = fs::path(spec.out_dir) / "manifest.json";
  std::ofstream out(manifest_path, std::ios::binary);
  out << to_json(manifest).dump(2) << "\n";
  return manifest;
}

bool replay_verify(const std::string& manifest_path, const std::string& out_dir,
                   std::string* detail) {
  const RunManifest manifest = load_manifest(manifest_path);
  std::ifstream in(manifest.files.at("spec"));
  if (!in) throw std::runtime_error("manifest spec file missing");
  json j;
  in >> j;
  ExperimentSpec spec = experiment_spec_from_json(j);
  for (auto& [name, b] : spec.backends)
    b.transcript_path = manifest.files.at("transcripts");
  spec.out_dir = out_dir;

  RunOptions options;
  options.mode_override = BackendMode::Replay;
  const RunManifest replayed = run_experiment(spec, options);

  const bool same = replayed.file_hashes.at("records") ==
                    manifest.file_hashes.at("records");
  if (!same && detail != nullptr)
    *detail = "records.jsonl differs between recorded and replayed runs";
  return same;
}

bool verify_manifest(const std::string& manifest_path, std::string* detail) {
  const RunManifest manifest = load_manifest(manifest_path);
  for (const auto& [name, path] : manifest.files) {
    if (!fs::exists(path)) {
      if (detail != nullptr) *detail = "missing file: " + path;
      return false;
    }
    const std::uint64_t actual = hash_file(path);
    if (actual != manifest.file_hashes.at(name)) {
      if (detail != nullptr) *detail = "hash mismatch: " + path;
      return false;
    }
  }
  return true;
}

}  // namespace klr
