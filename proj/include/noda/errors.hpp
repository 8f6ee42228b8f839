#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace noda {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct NonPositiveDenominator : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& what, std::size_t line_no)
      : Error(what + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
  std::size_t line;
};

struct UnsupportedFormat : Error {
  using Error::Error;
};

struct Breakdown : Error {
  using Error::Error;
};

struct SingularBorder : Error {
  using Error::Error;
};

struct NonPositiveSolution : Error {
  using Error::Error;
};

struct PositivityLost : Error {
  using Error::Error;
};

struct DeltaSignError : Error {
  using Error::Error;
};

struct DisconnectedGraph : Error {
  using Error::Error;
};

struct GenerationFailed : Error {
  using Error::Error;
};

struct SingularMatrix : Error {
  using Error::Error;
};

struct SizeGuard : Error {
  using Error::Error;
};

struct NoConvergence : Error {
  using Error::Error;
};

}  // namespace noda
