#ifdef KLR_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "klr/gateway/live.hpp"

#include <chrono>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace klr {

json build_chat_request(const BackendSpec& spec, const PromptContext& ctx) {
  json messages = json::array();
  for (const auto& m : ctx.messages)
    messages.push_back(json{{"role", m.role}, {"content", m.content}});
  return json{{"model", spec.model},
              {"messages", messages},
              {"temperature", ctx.sampling.temperature},
              {"top_p", ctx.sampling.top_p}};
}

Completion parse_chat_response(const json& body, const PromptContext& ctx) {
  Completion c;
  c.text = body.at("choices").at(0).at("message").at("content").get<std::string>();
  if (body.contains("usage")) {
    c.usage.input_tokens = body.at("usage").value("prompt_tokens", 0);
    c.usage.output_tokens = body.at("usage").value("completion_tokens", 0);
  } else {
    c.usage.input_tokens = estimate_tokens(ctx.rendered());
    c.usage.output_tokens = estimate_tokens(c.text);
  }
  return c;
}

RateLimiter& RateLimiter::instance() {
  static RateLimiter limiter;
  return limiter;
}

void RateLimiter::acquire(double requests_per_minute) {
  if (requests_per_minute <= 0) return;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  const auto now_us = std::chrono::duration_cast<std::chrono::microseconds>(
                          std::chrono::steady_clock::now().time_since_epoch())
                          .count();
  const auto min_gap_us =
      static_cast<std::int64_t>(60.0 * 1e6 / requests_per_minute);
  const auto earliest = last_request_us_ + min_gap_us;
  if (now_us < earliest)
    std::this_thread::sleep_for(std::chrono::microseconds(earliest - now_us));
  last_request_us_ = std::max(now_us, earliest);
}

LiveBackend::LiveBackend(BackendSpec spec) : DecisionBackend(std::move(spec)) {
  spec_.validate();
  const char* key = std::getenv(spec_.auth_env.c_str());
  if (key == nullptr || *key == '\0')
    throw std::runtime_error("live backend: environment variable " +
                             spec_.auth_env + " is not set");
  api_key_ = key;
}

Completion LiveBackend::attempt(const PromptContext& ctx) {
  RateLimiter::instance().acquire(spec_.requests_per_minute);

  httplib::Client client(spec_.endpoint);
  client.set_connection_timeout(30);
  client.set_read_timeout(120);

  httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
  const std::string body = build_chat_request(spec_, ctx).dump();
  auto res = client.Post(spec_.path, headers, body, "application/json");
  if (!res)
    throw std::runtime_error("live backend: transport error " +
                             httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw std::runtime_error("live backend: HTTP " + std::to_string(res->status) +
                             ": " + res->body);
  return parse_chat_response(json::parse(res->body), ctx);
}

}  // namespace klr
