#pragma once

#include <stdexcept>
#include <string>

namespace curos {

// Bad dimensions, out-of-range parameters, malformed input.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A selected submatrix or intersection is (numerically) singular.
class DegeneracyError : public std::runtime_error {
public:
    explicit DegeneracyError(const std::string& what, double condition = 0.0)
        : std::runtime_error(what), condition_(condition) {}

    // Condition estimate of the offending matrix, +inf when exactly singular.
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

// Non-finite values appeared during time integration.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
    long step() const noexcept { return step_; }

private:
    long step_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace curos
