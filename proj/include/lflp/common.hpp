#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lflp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Absolute tolerance for every comparison that gates a discrete decision.
inline constexpr double kTol = 1e-9;

inline bool is_inf(double x) { return std::isinf(x); }

// Saturating (x)^+ : (x - inf)^+ = 0, (inf - x)^+ = inf.
inline double pos(double x) { return x > 0.0 ? x : 0.0; }

enum class ErrorCode {
  InvalidInstance,
  InvalidParams,
  NonTermination,
  BudgetExceeded,
  ViolationFound,
  CertificateFailure,
  DegenerateRegion,
  NonIntegralMass,
  ShapeMismatch,
  InfeasibleInput,
  ParseError,
  UnknownId,
  MissingData,
  IO,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lflp
