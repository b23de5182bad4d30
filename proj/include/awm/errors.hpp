#pragma once

#include <stdexcept>
#include <string>

namespace awm {

// Infeasible or out-of-range model parameters / inputs.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Iterative procedure failed to reach its tolerance within its budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual, long steps)
        : std::runtime_error(what), residual(residual), steps(steps) {}
    double residual;
    long steps;
};

// Malformed input text (CSV/JSON); line is 1-based, 0 if not applicable.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line(line) {}
    std::size_t line;
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace awm
