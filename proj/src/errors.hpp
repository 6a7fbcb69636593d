#pragma once

#include <stdexcept>
#include <string>

namespace hw {

// Bad caller input (ranges, sizes, unknown keys).
struct ArgumentError : std::runtime_error {
  explicit ArgumentError(const std::string& m) : std::runtime_error(m) {}
};

// Filesystem problems.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& m) : std::runtime_error(m) {}
};

// Malformed input content; message carries a line number where known.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& m) : std::runtime_error(m) {}
};

// Sampler / numeric failures (non-finite posteriors, non-convergence).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace hw
