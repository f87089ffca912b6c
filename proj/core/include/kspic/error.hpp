#pragma once

#include <stdexcept>
#include <string>

namespace kspic {

/// Invalid user-facing configuration (unknown key, bad value, inconsistent combination).
/// The CLI maps this to exit code 1.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Violated precondition or numerical failure inside a module. Exit code 2 from the CLI.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kspic
