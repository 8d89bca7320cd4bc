#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tehom {

enum class ErrorKind {
  InvalidParameter,
  UnsupportedOrder,
  DomainError,
  FactorizationFailure,
  RegimeError,
  DegenerateContrast,
  NumericalResonance,
  OutOfRange,
  Parse,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::UnsupportedOrder: return "unsupported-order";
    case ErrorKind::DomainError: return "domain-error";
    case ErrorKind::FactorizationFailure: return "factorization-failure";
    case ErrorKind::RegimeError: return "regime-error";
    case ErrorKind::DegenerateContrast: return "degenerate-contrast";
    case ErrorKind::NumericalResonance: return "numerical-resonance";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::Parse: return "parse-error";
  }
  return "unknown";
}

/// Every failure raised by the toolkit carries one of the kinds above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

}  // namespace tehom
