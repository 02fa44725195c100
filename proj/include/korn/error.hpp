#pragma once

#include <stdexcept>
#include <string>

namespace korn {

/// Error raised by any module. Carries the module name, the failing stage and
/// a remediation hint so the CLI can surface all three.
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string stage, const std::string& message,
        std::string hint = {})
      : std::runtime_error(module + "/" + stage + ": " + message +
                           (hint.empty() ? std::string{} : " (hint: " + hint + ")")),
        module_(std::move(module)),
        stage_(std::move(stage)),
        hint_(std::move(hint)) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& stage() const noexcept { return stage_; }
  const std::string& hint() const noexcept { return hint_; }

 private:
  std::string module_;
  std::string stage_;
  std::string hint_;
};

}  // namespace korn
