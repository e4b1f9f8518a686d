#ifndef RICCATI_ERROR_HPP
#define RICCATI_ERROR_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace riccati {

enum class ErrorCode {
  Singular,
  NotHermitian,
  SingularU,
  SingularP,
  Overflow,
  ParseError,
  DimMismatch,
  HypothesisViolation,
  InvalidArgument,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Singular: return "SINGULAR";
    case ErrorCode::NotHermitian: return "NOT_HERMITIAN";
    case ErrorCode::SingularU: return "SINGULAR_U";
    case ErrorCode::SingularP: return "SINGULAR_P";
    case ErrorCode::Overflow: return "OVERFLOW";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::DimMismatch: return "DIM_MISMATCH";
    case ErrorCode::HypothesisViolation: return "HYPOTHESIS_VIOLATION";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN";
}

/// Library-wide exception. `time()` is NaN unless the failure is tied to an
/// instant (e.g. U(t) singular at a grid point).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, double t = std::nan(""))
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        t_(t) {}

  ErrorCode code() const noexcept { return code_; }
  double time() const noexcept { return t_; }
  bool has_time() const noexcept { return !std::isnan(t_); }

 private:
  ErrorCode code_;
  double t_;
};

}  // namespace riccati

#endif  // RICCATI_ERROR_HPP
