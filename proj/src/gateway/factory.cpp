#include "klr/gateway/backend.hpp"
#include "klr/gateway/live.hpp"
#include "klr/gateway/replay.hpp"
#include "klr/gateway/scripted.hpp"

namespace klr {

std::unique_ptr<DecisionBackend> make_backend(const BackendSpec& spec) {
  spec.validate();
  switch (spec.mode) {
    case BackendMode::Scripted:
      return std::make_unique<ScriptedBackend>(spec);
    case BackendMode::Replay:
      return std::make_unique<ReplayBackend>(
          spec, ReplayBackend::load_jsonl(spec.transcript_path));
    case BackendMode::Live:
      return std::make_unique<LiveBackend>(spec);
  }
  throw std::logic_error("make_backend: unknown mode");
}

}  // namespace klr
