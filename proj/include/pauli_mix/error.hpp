#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pauli_mix {

enum class ErrorCode {
  InvalidArgument,
  NotPrimePower,
  FieldMismatch,
  UnsupportedDimension,
  NegativeTime,
  RateSingular,
  SingularAtT,
  SingularAtGridPoint,
  NotQubit,
  NonHermitian,
  RegimeMismatch,
  UnsupportedFamily,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotPrimePower: return "NotPrimePower";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::RateSingular: return "RateSingular";
    case ErrorCode::SingularAtT: return "SingularAtT";
    case ErrorCode::SingularAtGridPoint: return "SingularAtGridPoint";
    case ErrorCode::NotQubit: return "NotQubit";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
    case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map them to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace pauli_mix
