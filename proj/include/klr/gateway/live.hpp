#pragma once

#include "klr/gateway/backend.hpp"

namespace klr {

// OpenAI-compatible chat-completions request body for one context.
json build_chat_request(const BackendSpec& spec, const PromptContext& ctx);

// Extracts (text, usage) from a chat-completions response body; falls back
// to the chars/4 estimate when the server omits usage.
Completion parse_chat_response(const json& body, const PromptContext& ctx);

// Simple global limiter shared by all live backends in the process.
class RateLimiter {
 public:
  static RateLimiter& instance();
  void acquire(double requests_per_minute);

 private:
  RateLimiter() = default;
  std::int64_t last_request_us_ = 0;
};

class LiveBackend final : public DecisionBackend {
 public:
  explicit LiveBackend(BackendSpec spec);

 protected:
  Completion attempt(const PromptContext& ctx) override;
  bool sleeps_between_attempts() const override { return true; }

 private:
  std::string api_key_;
};

}  // namespace klr
