#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "klr/core/match.hpp"
#include "klr/core/types.hpp"

namespace klr {

enum class BackendMode { Live, Scripted, Replay };

std::string to_string(BackendMode m);
BackendMode backend_mode_from_string(const std::string& s);

struct RetryPolicy {
  int max_attempts = 3;
  int backoff_ms = 250;  // doubles per attempt
};

struct BackendSpec {
  BackendMode mode = BackendMode::Scripted;
  // Live
  std::string endpoint;                 // e.g. https://api.openai.com
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string auth_env = "OPENAI_API_KEY";
  // Scripted
  std::string script_id = "echo40";
  // Replay
  std::string transcript_path;
  SamplingParams sampling;
  RetryPolicy retry;
  double requests_per_minute = 0;  // 0 = unlimited

  void validate() const;
};

json to_json(const BackendSpec& s);
BackendSpec backend_spec_from_json(const json& j);

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

// One request to a decision backend. `player` is the seat the call is billed
// to (transcript stream key); `perspective` is whose shoes the prompt is in,
// which differs from `player` inside recursive anticipation.
struct PromptContext {
  GameKind game = GameKind::G08A;
  std::string method;
  std::string step;
  int player = 0;
  int perspective = 0;
  int round = 1;
  SamplingParams sampling;
  std::vector<ChatMessage> messages;
  json meta = json::object();  // structured mirror for scripted backends

  std::string rendered() const;
};

struct Completion {
  std::string text;
  Usage usage;  // call_count == 1
};

// chars/4 tokenizer proxy: a platform-stable approximation.
std::int64_t estimate_tokens(const std::string& text);

std::uint64_t fnv1a64(const std::string& data);

struct TranscriptRecord {
  int agent = 0;  // billing seat
  std::string method;
  std::string step;
  int round = 1;
  std::uint64_t request_hash = 0;
  std::string prompt;
  std::string response;
  Usage usage;
  bool failed = false;
  std::string error;
};

json to_json(const TranscriptRecord& r);
TranscriptRecord transcript_record_from_json(const json& j);

// The boundary to language models. complete() retries per policy, logs every
// failed attempt, and logs the final success exactly once.
class DecisionBackend {
 public:
  explicit DecisionBackend(BackendSpec spec) : spec_(std::move(spec)) {}
  virtual ~DecisionBackend() = default;

  Completion complete(const PromptContext& ctx);

  const BackendSpec& spec() const { return spec_; }
  const std::vector<TranscriptRecord>& transcript() const { return transcript_; }
  std::vector<TranscriptRecord> take_transcript() { return std::move(transcript_); }

  // Successful calls only.
  Usage total_usage() const;

 protected:
  virtual Completion attempt(const PromptContext& ctx) = 0;
  virtual int effective_attempts() const { return spec_.retry.max_attempts; }
  virtual bool sleeps_between_attempts() const { return false; }

  BackendSpec spec_;

 private:
  std::vector<TranscriptRecord> transcript_;
};

class ScriptRegistry;

std::unique_ptr<DecisionBackend> make_backend(const BackendSpec& spec);

}  // namespace klr
