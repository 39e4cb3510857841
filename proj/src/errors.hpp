#ifndef BIFI_ERRORS_HPP
#define BIFI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bifi {

// Invalid argument or configuration value supplied by the caller.
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// Config file / key-value parse failure; carries the offending key and line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string key, int line)
      : std::runtime_error(what), key_(std::move(key)), line_(line) {}
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

// A time integrator produced a non-finite value.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(const std::string& what, long step)
      : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bifi

#endif  // BIFI_ERRORS_HPP
