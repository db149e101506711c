#pragma once

#include <stdexcept>
#include <string>

namespace newform {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A result would carry fewer significant digits than the guard band allows,
/// or an input is not known to the precision an operation needs.
struct PrecisionLoss : Error {
  using Error::Error;
};

struct DivisionByIndistinguishableZero : Error {
  using Error::Error;
};

/// A valuation (or ideal membership) cannot be decided at working precision.
struct AmbiguousValuation : Error {
  using Error::Error;
};

/// Parameters (x, y) of u(x, y) or û(x, y) violate y + ȳ + x·x̄ = 0.
struct IsotropyViolation : Error {
  using Error::Error;
};

struct NotNormOne : Error {
  using Error::Error;
};

struct NotUnitary : Error {
  using Error::Error;
};

/// The double-coset reduction could not produce a verifying certificate.
struct ReductionIncomplete : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace newform
