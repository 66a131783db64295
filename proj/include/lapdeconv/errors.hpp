#pragma once

#include <stdexcept>
#include <string>

namespace lapdeconv {

/// Malformed or out-of-domain input data (unsorted times, bad CSV, ...).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A convolution-kernel or smoothing-kernel specification that violates its
/// preconditions (e.g. kernel order L <= r, unknown builtin name).
class KernelSpecError : public std::invalid_argument {
 public:
  explicit KernelSpecError(const std::string& what) : std::invalid_argument(what) {}
};

/// The estimator could not produce a result for the given data
/// (empty bandwidth grid, empty smoothing window, ...).
class EstimatorError : public std::runtime_error {
 public:
  explicit EstimatorError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lapdeconv
