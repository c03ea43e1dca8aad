#pragma once

#include <map>
#include <vector>

#include "klr/gateway/backend.hpp"

namespace klr {

// Serves a previously recorded transcript back, matching requests by
// position within each billing seat's stream. A request-hash mismatch is a
// warning (prompt drift), exhaustion is an error.
class ReplayBackend final : public DecisionBackend {
 public:
  ReplayBackend(BackendSpec spec, std::vector<TranscriptRecord> source);

  // Convenience: loads a whole-file transcript (single match).
  static std::vector<TranscriptRecord> load_jsonl(const std::string& path);

  int mismatch_count() const { return mismatches_; }

 protected:
  Completion attempt(const PromptContext& ctx) override;
  int effective_attempts() const override { return 1; }

 private:
  std::vector<TranscriptRecord> source_;
  std::map<int, std::size_t> cursor_;  // per billing seat, indices into source_
  std::map<int, std::vector<std::size_t>> streams_;
  int mismatches_ = 0;
};

}  // namespace klr
