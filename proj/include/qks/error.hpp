#pragma once

#include <stdexcept>
#include <string>

namespace qks {

/// Failure categories. The CLI maps each to a distinct exit status.
enum class ErrorCode {
  contract_violation,
  degenerate_dataset,
  invalid_amplitude,
  sampler_starvation,
  empty_distribution,
  brute_force_infeasible,
  list_size_cap,
  config_error,
  io_error,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Caller broke a documented precondition (dimension mismatch, empty input, ...).
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what)
      : Error(ErrorCode::contract_violation, what) {}
};

inline void require(bool condition, const char* message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace qks
