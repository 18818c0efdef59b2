#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sca {

// Sizes of two configurations/vectors disagree, or a vector does not match
// the model's vertex count.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Instance is too large for an exhaustive computation.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Invalid model data (self-loop, duplicate pair, non-finite value, ...).
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid run configuration (schedule, sampler parameters, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative method hit its cap; carries the best estimate reached.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate)
      : std::runtime_error(what), best_estimate_(best_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace sca
