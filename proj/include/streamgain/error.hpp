#pragma once

#include <stdexcept>
#include <string>

namespace streamgain {

// Every failure carries a short machine-readable kind ("load", "invariant",
// "config", ...) next to the human message so the CLI can print one
// parsable line per error.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

[[noreturn]] inline void fail(const std::string& kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace streamgain
