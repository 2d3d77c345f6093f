#pragma once

#include <stdexcept>
#include <string>

namespace copref {

/// Unreadable or malformed user input (CSV rows, config values, missing files).
/// The CLI maps this to exit code 1.
class input_error : public std::runtime_error {
public:
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

/// A detection or numerical routine could not produce a result
/// (empty graph, eigensolver non-convergence). CLI exit code 2.
class algorithm_error : public std::runtime_error {
public:
  explicit algorithm_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace copref
