#pragma once

#include <stdexcept>
#include <string>

namespace edda {

// Image or tensor dimensions do not match what the consumer expects.
class InputShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bad call arguments (class index out of range, size mismatch, bad fraction).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inconsistent configuration: unknown layer, unknown key, strategy/task mismatch.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed archive, checkpoint, report or image file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Synthetic data could not be generated under the requested constraints.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace edda
