#pragma once

#include <stdexcept>
#include <string>

namespace rikit {

enum class ErrorCode {
  invalid_argument,
  domain_error,
  non_integrable_weight,
  resolution_too_coarse,
  precondition_violation,
  unsupported_associate,
  unsupported_space,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// CLI can map it onto an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::domain_error: return "domain-error";
    case ErrorCode::non_integrable_weight: return "non-integrable-weight";
    case ErrorCode::resolution_too_coarse: return "resolution-too-coarse";
    case ErrorCode::precondition_violation: return "precondition-violation";
    case ErrorCode::unsupported_associate: return "unsupported-associate";
    case ErrorCode::unsupported_space: return "unsupported-space";
  }
  return "unknown";
}

}  // namespace rikit
