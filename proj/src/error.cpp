#include "ifbls/error.hpp"

namespace ifbls {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension_mismatch: return "dimension mismatch";
    case ErrorKind::non_finite_input: return "non-finite input";
    case ErrorKind::factorization_failed: return "factorization failed";
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::missing_class: return "missing class";
    case ErrorKind::parse_error: return "parse error";
    case ErrorKind::io_error: return "i/o error";
  }
  return "unknown error";
}

}  // namespace ifbls
