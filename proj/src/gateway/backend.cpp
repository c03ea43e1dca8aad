#include "klr/gateway/backend.hpp"

#include <chrono>
#include <stdexcept>
#include <thread>

namespace klr {

std::string to_string(BackendMode m) {
  switch (m) {
    case BackendMode::Live: return "live";
    case BackendMode::Scripted: return "scripted";
    case BackendMode::Replay: return "replay";
  }
  throw std::logic_error("unknown BackendMode");
}

BackendMode backend_mode_from_string(const std::string& s) {
  if (s == "live") return BackendMode::Live;
  if (s == "scripted") return BackendMode::Scripted;
  if (s == "replay") return BackendMode::Replay;
  throw std::invalid_argument("unknown backend mode: " + s);
}

void BackendSpec::validate() const {
  if (mode == BackendMode::Live && (endpoint.empty() || model.empty()))
    throw std::invalid_argument("live backend requires endpoint and model");
  if (mode == BackendMode::Replay && transcript_path.empty())
    throw std::invalid_argument("replay backend requires a transcript path");
  if (retry.max_attempts < 1)
    throw std::invalid_argument("retry.max_attempts must be >= 1");
}

json to_json(const BackendSpec& s) {
  return json{{"mode", to_string(s.mode)},
              {"endpoint", s.endpoint},
              {"path", s.path},
              {"model", s.model},
              {"auth_env", s.auth_env},
              {"script_id", s.script_id},
              {"transcript_path", s.transcript_path},
              {"sampling", to_json(s.sampling)},
              {"retry", {{"max_attempts", s.retry.max_attempts},
                         {"backoff_ms", s.retry.backoff_ms}}},
              {"requests_per_minute", s.requests_per_minute}};
}

BackendSpec backend_spec_from_json(const json& j) {
  BackendSpec s;
  s.mode = backend_mode_from_string(j.value("mode", "scripted"));
  s.endpoint = j.value("endpoint", "");
  s.path = j.value("path", "/v1/chat/completions");
  s.model = j.value("model", "");
  s.auth_env = j.value("auth_env", "OPENAI_API_KEY");
  s.script_id = j.value("script_id", "echo40");
  s.transcript_path = j.value("transcript_path", "");
  if (j.contains("sampling")) s.sampling = sampling_from_json(j.at("sampling"));
  if (j.contains("retry")) {
    s.retry.max_attempts = j.at("retry").value("max_attempts", 3);
    s.retry.backoff_ms = j.at("retry").value("backoff_ms", 250);
  }
  s.requests_per_minute = j.value("requests_per_minute", 0.0);
  return s;
}

std::string PromptContext::rendered() const {
  std::string out;
  for (const auto& m : messages) {
    out += m.role;
    out += ": ";
    out += m.content;
    out += "\n";
  }
  return out;
}

std::int64_t estimate_tokens(const std::string& text) {
  return static_cast<std::int64_t>((text.size() + 3) / 4);
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json to_json(const TranscriptRecord& r) {
  json j{{"agent", r.agent},
         {"method", r.method},
         {"step", r.step},
         {"round", r.round},
         {"request_hash", r.request_hash},
         {"prompt", r.prompt},
         {"response", r.response},
         {"usage", to_json(r.usage)},
         {"failed", r.failed}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

TranscriptRecord transcript_record_from_json(const json& j) {
  TranscriptRecord r;
  r.agent = j.at("agent").get<int>();
  r.method = j.value("method", "");
  r.step = j.value("step", "");
  r.round = j.value("round", 1);
  r.request_hash = j.at("request_hash").get<std::uint64_t>();
  r.prompt = j.value("prompt", "");
  r.response = j.at("response").get<std::string>();
  r.usage = usage_from_json(j.at("usage"));
  r.failed = j.value("failed", false);
  r.error = j.value("error", "");
  return r;
}

Completion DecisionBackend::complete(const PromptContext& ctx) {
  const std::string prompt = ctx.rendered();
  if (prompt.empty()) throw std::invalid_argument("complete: empty prompt");

  const int attempts = effective_attempts();
  std::string last_error;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    try {
      Completion c = this->attempt(ctx);
      c.usage.call_count = 1;
      TranscriptRecord rec;
      rec.agent = ctx.player;
      rec.method = ctx.method;
      rec.step = ctx.step;
      rec.round = ctx.round;
      rec.request_hash = fnv1a64(prompt);
      rec.prompt = prompt;
      rec.response = c.text;
      rec.usage = c.usage;
      transcript_.push_back(std::move(rec));
      return c;
    } catch (const std::exception& e) {
      last_error = e.what();
      TranscriptRecord rec;
      rec.agent = ctx.player;
      rec.method = ctx.method;
      rec.step = ctx.step;
      rec.round = ctx.round;
      rec.request_hash = fnv1a64(prompt);
      rec.prompt = prompt;
      rec.failed = true;
      rec.error = last_error;
      transcript_.push_back(std::move(rec));
      if (attempt < attempts && sleeps_between_attempts()) {
        const auto delay = std::chrono::milliseconds(
            spec_.retry.backoff_ms << (attempt - 1));
        std::this_thread::sleep_for(delay);
      }
    }
  }
  throw std::runtime_error("backend failed after " + std::to_string(attempts) +
                           " attempts: " + last_error);
}

Usage DecisionBackend::total_usage() const {
  Usage total;
  for (const auto& r : transcript_)
    if (!r.failed) total += r.usage;
  return total;
}

}  // namespace klr
