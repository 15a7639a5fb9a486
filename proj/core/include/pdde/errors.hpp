#pragma once

#include <stdexcept>
#include <string>

namespace pdde {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parse failure; line and column are 1-based.
struct SyntaxError : Error {
  int line = 0;
  int col = 0;
  SyntaxError(const std::string& msg, int line_, int col_)
      : Error(msg + " at line " + std::to_string(line_) + ", column " +
              std::to_string(col_)),
        line(line_),
        col(col_) {}
};

struct UnknownVariable : Error {
  using Error::Error;
};

// A series inverse or quotient does not exist at the requested order.
struct NonInvertibleSeries : Error {
  using Error::Error;
};

// Exact division was requested but the dividend is not a multiple.
struct NotDivisible : Error {
  using Error::Error;
};

// The equation reads solution coefficients at or beyond the order currently
// being computed, so the coefficient recurrence cannot make progress.
struct WellFoundedViolation : Error {
  using Error::Error;
};

struct OrderMismatch : Error {
  using Error::Error;
};

struct ZeroDenominator : Error {
  using Error::Error;
};

// Clearing denominators of a catalytic equation produced a denominator that
// is not a single monomial in the catalytic variable.
struct DenominatorNotMonomial : Error {
  using Error::Error;
};

// Elimination got stuck: every candidate step yields an identically zero
// resultant and no factor can be stripped to make progress.
struct EliminationCollapse : Error {
  using Error::Error;
};

struct NoConvergence : Error {
  using Error::Error;
};

struct SingularJacobian : Error {
  using Error::Error;
};

// Path continuation reduced its step size below the configured floor.
struct StepCollapse : Error {
  using Error::Error;
};

// Two independent derivative computations disagree beyond tolerance.
struct DerivativeMismatch : Error {
  using Error::Error;
};

// A weight series has exponents outside 3*Z, so it cannot be rewritten in
// the cube-root edge variable.
struct FractionalExponentResidue : Error {
  using Error::Error;
};

// A root finder landed on (or bracketed) a root of multiplicity > 1 where a
// simple root was required.
struct MultipleRoots : Error {
  using Error::Error;
};

}  // namespace pdde
