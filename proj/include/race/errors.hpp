#pragma once

#include <stdexcept>
#include <string>

namespace race {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// shape disagreement between operands
struct DimensionError : Error {
  using Error::Error;
};

// a matrix that must be inverted has no inverse
struct SingularMatrixError : Error {
  using Error::Error;
};

// collapsed vector during orthogonalization with no way to redraw it
struct DegeneracyError : Error {
  using Error::Error;
};

// API precondition broken by the caller
struct ContractError : Error {
  using Error::Error;
};

struct ParseError : Error {
  int line;
  ParseError(const std::string& msg, int line_no)
      : Error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

}  // namespace race
