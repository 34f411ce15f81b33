#pragma once

#include <stdexcept>
#include <string>

namespace mcp {

/// Malformed input data (dataset files, model containers).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid parameter combination detected before any computation starts.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative optimization exceeded its budget.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mcp
