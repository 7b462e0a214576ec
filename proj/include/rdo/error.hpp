#pragma once

#include <stdexcept>
#include <string>

namespace rdo {

/// Error categories surfaced to callers and in the CLI's error record.
enum class ErrorCode {
  invalid_argument,
  invalid_space,
  dimension_mismatch,
  fit_error,
  zero_variance,
  undefined_metric,
  empty_overlap,
  evaluator_failure,
  io_error,
  parse_error,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rdo
