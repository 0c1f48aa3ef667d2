#pragma once

#include <stdexcept>
#include <string>

namespace latestop {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind { config, data, run, numeric, evaluation, internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};
// Malformed input data, shape mismatches, out-of-range labels.
struct InputError : Error {
  explicit InputError(const std::string& w) : Error(ErrorKind::data, w) {}
};
struct RunError : Error {
  explicit RunError(const std::string& w) : Error(ErrorKind::run, w) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error(ErrorKind::numeric, w) {}
};
struct EvaluationError : Error {
  explicit EvaluationError(const std::string& w) : Error(ErrorKind::evaluation, w) {}
};
struct InternalError : Error {
  explicit InternalError(const std::string& w) : Error(ErrorKind::internal, w) {}
};

const char* to_string(ErrorKind kind) noexcept;
int exit_code(ErrorKind kind) noexcept;

}  // namespace latestop
