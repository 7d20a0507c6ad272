#pragma once

#include <stdexcept>
#include <string>

namespace ifbls {

enum class ErrorKind {
  dimension_mismatch,
  non_finite_input,
  factorization_failed,
  invalid_argument,
  missing_class,
  parse_error,
  io_error,
};

const char* to_string(ErrorKind kind);

// Every library failure is raised as this type so callers can branch on kind()
// without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ifbls
