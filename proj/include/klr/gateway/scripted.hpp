#pragma once

#include <functional>
#include <map>
#include <string>

#include "klr/gateway/backend.hpp"

namespace klr {

using ScriptFn = std::function<std::string(const PromptContext&)>;

// Deterministic stand-ins for a model. Scripts are pure functions of the
// request; ids of the form "fixed:<text>" answer <text> verbatim.
class ScriptRegistry {
 public:
  static ScriptRegistry& instance();

  void register_script(const std::string& id, ScriptFn fn);
  ScriptFn resolve(const std::string& id) const;
  bool contains(const std::string& id) const;

 private:
  ScriptRegistry();
  std::map<std::string, ScriptFn> scripts_;
};

class ScriptedBackend final : public DecisionBackend {
 public:
  explicit ScriptedBackend(BackendSpec spec)
      : DecisionBackend(std::move(spec)),
        script_(ScriptRegistry::instance().resolve(spec_.script_id)) {}

 protected:
  Completion attempt(const PromptContext& ctx) override;

 private:
  ScriptFn script_;
};

}  // namespace klr
