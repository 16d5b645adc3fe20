#include "qks/error.hpp"

namespace qks {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::contract_violation: return "contract_violation";
    case ErrorCode::degenerate_dataset: return "degenerate_dataset";
    case ErrorCode::invalid_amplitude: return "invalid_amplitude";
    case ErrorCode::sampler_starvation: return "sampler_starvation";
    case ErrorCode::empty_distribution: return "empty_distribution";
    case ErrorCode::brute_force_infeasible: return "brute_force_infeasible";
    case ErrorCode::list_size_cap: return "list_size_cap";
    case ErrorCode::config_error: return "config_error";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

}  // namespace qks
