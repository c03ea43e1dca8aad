#include "klr/gateway/replay.hpp"

#include <fstream>
#include <iostream>
#include <stdexcept>

namespace klr {

ReplayBackend::ReplayBackend(BackendSpec spec, std::vector<TranscriptRecord> source)
    : DecisionBackend(std::move(spec)), source_(std::move(source)) {
  for (std::size_t i = 0; i < source_.size(); ++i) {
    if (source_[i].failed) continue;  // failed attempts are not replayed
    streams_[source_[i].agent].push_back(i);
  }
}

std::vector<TranscriptRecord> ReplayBackend::load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open transcript: " + path);
  std::vector<TranscriptRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(transcript_record_from_json(json::parse(line)));
  }
  return records;
}

Completion ReplayBackend::attempt(const PromptContext& ctx) {
  auto stream = streams_.find(ctx.player);
  std::size_t& pos = cursor_[ctx.player];
  if (stream == streams_.end() || pos >= stream->second.size())
    throw std::runtime_error("replay transcript exhausted for agent " +
                             std::to_string(ctx.player));
  const TranscriptRecord& rec = source_[stream->second[pos]];
  pos += 1;

  if (rec.request_hash != fnv1a64(ctx.rendered())) {
    mismatches_ += 1;
    std::cerr << "[replay] request hash mismatch (agent " << ctx.player
              << ", round " << ctx.round << "); replaying recorded response anyway\n";
  }

  Completion c;
  c.text = rec.response;
  c.usage = rec.usage;
  c.usage.call_count = 1;
  return c;
}

}  // namespace klr
