#pragma once

#include <stdexcept>
#include <string>

namespace bellcrbm {

// Base for every error raised by the library. The CLI maps the subclasses
// onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised by the training loop when a parameter blows up or the objective
// stops being finite.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace bellcrbm
