#include "latestop/errors.hpp"

namespace latestop {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::data: return "data";
    case ErrorKind::run: return "run";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::evaluation: return "evaluation";
    case ErrorKind::internal: return "internal";
  }
  return "internal";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::data: return 3;
    case ErrorKind::evaluation: return 3;
    case ErrorKind::run:
    case ErrorKind::numeric:
    case ErrorKind::internal: return 4;
  }
  return 4;
}

}  // namespace latestop
