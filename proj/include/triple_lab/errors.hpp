#pragma once

#include <stdexcept>
#include <string>

namespace triple_lab {

/// Caller supplied malformed input (dimension mismatch, bad descriptor, out-of-range parameter).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument lies outside the mathematical domain of the operation (e.g. a point outside the open ball).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iteration failed to converge or a post-condition residual was not met.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularityError : public NumericalFailure {
public:
    SingularityError(const std::string& what, double condition_estimate)
        : NumericalFailure(what), condition_estimate_(condition_estimate) {}

    double condition_estimate() const noexcept { return condition_estimate_; }

private:
    double condition_estimate_;
};

/// A holomorphic map left the open unit ball.
class InvalidMapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace triple_lab
