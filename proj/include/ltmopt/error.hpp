#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ltmopt {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A precondition on an argument value does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// An intervention that violates h <= rho, or a statistical intervention
// inconsistent with the statistics it was built for.
class InfeasibleIntervention : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Rejection sampling of the configuration model ran out of retries.
class SamplingError : public Error {
 public:
  using Error::Error;
};

}  // namespace ltmopt
