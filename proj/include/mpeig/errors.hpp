#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpeig {

// Shape or configuration misuse. Thrown before any arithmetic happens.
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ZeroVector : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numeric failures carry the offending row/column where one exists.
struct NotPositiveDefinite : std::runtime_error {
  std::size_t index;
  NotPositiveDefinite(std::size_t idx, const std::string& msg)
      : std::runtime_error(msg), index(idx) {}
};

struct SingularTriangular : std::runtime_error {
  std::size_t index;
  SingularTriangular(std::size_t idx, const std::string& msg)
      : std::runtime_error(msg), index(idx) {}
};

struct RankDeficient : std::runtime_error {
  std::size_t column;
  RankDeficient(std::size_t col, const std::string& msg)
      : std::runtime_error(msg), column(col) {}
};

struct RankDeficientBasis : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RankCollapse : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A value left the representable range of the narrow format.
struct OverflowError : std::range_error {
  using std::range_error::range_error;
};

struct OverflowInLower : OverflowError {
  std::size_t row;
  OverflowInLower(std::size_t r, const std::string& msg)
      : OverflowError(msg), row(r) {}
};

// Domain errors from the error-bound calculators.
struct AssumptionViolated : std::domain_error {
  using std::domain_error::domain_error;
};

struct BoundVacuous : std::domain_error {
  using std::domain_error::domain_error;
};

struct OutOfInterval : std::domain_error {
  using std::domain_error::domain_error;
};

struct GammaTooLarge : std::domain_error {
  using std::domain_error::domain_error;
};

struct DenominatorNonpositive : std::domain_error {
  using std::domain_error::domain_error;
};

// Matrix Market I/O.
struct ParseError : std::runtime_error {
  std::size_t line;
  std::size_t column;
  ParseError(std::size_t ln, std::size_t col, const std::string& msg)
      : std::runtime_error("line " + std::to_string(ln) + ", field " +
                           std::to_string(col) + ": " + msg),
        line(ln),
        column(col) {}
};

struct NotSquare : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotSymmetricHeader : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mpeig
