#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ccembed {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: dimension mismatches, out-of-range parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

// Data that cannot support the requested statistic (e.g. all points equal).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

class FactorizationError : public Error {
 public:
  FactorizationError(std::size_t pivot, const std::string& what)
      : Error(what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// A rollout produced a non-finite state. step is 0-based (the step whose
// output was non-finite).
class SimulationDivergence : public Error {
 public:
  SimulationDivergence(std::size_t step, const std::string& what)
      : Error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// Failure while reading a dataset/library file. line is 1-based, 0 if the
// failure is not tied to a line.
class LoadError : public Error {
 public:
  LoadError(std::size_t line, const std::string& what)
      : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ccembed
