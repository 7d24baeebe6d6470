#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace stils {

/// Raised by the expression parser; carries the byte offset of the fault.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Raised when an expression references a variable absent from the context.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an iterative solver hits its iteration cap; carries the best iterate.
class NoConvergenceError : public std::runtime_error {
public:
    NoConvergenceError(const std::string& what, std::vector<double> best_iterate,
                       int iterations, double residual)
        : std::runtime_error(what),
          best_iterate_(std::move(best_iterate)),
          iterations_(iterations),
          residual_(residual) {}

    const std::vector<double>& best_iterate() const { return best_iterate_; }
    int iterations() const { return iterations_; }
    double residual() const { return residual_; }

private:
    std::vector<double> best_iterate_;
    int iterations_;
    double residual_;
};

}  // namespace stils
