#pragma once

#include <stdexcept>
#include <string>

namespace hsiga {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed file header or unparseable content.
class FormatError : public Error {
public:
    using Error::Error;
};

/// File shorter than its header declares.
class TruncationError : public Error {
public:
    using Error::Error;
};

/// Inputs violate a documented precondition (dimensions, ranges, class sets).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A sampling request cannot be met by the available data.
class InsufficientData : public Error {
public:
    using Error::Error;
};

/// nu is larger than the class balance of a binary subproblem allows.
class InfeasibleNu : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Raised when a fitness evaluation throws; carries the individual's position.
class FitnessError : public Error {
public:
    FitnessError(std::size_t epoch, std::size_t individual, const std::string& what)
        : Error("fitness evaluation failed (epoch " + std::to_string(epoch) + ", individual "
                + std::to_string(individual) + "): " + what),
          epoch_(epoch), individual_(individual) {}

    std::size_t epoch() const noexcept { return epoch_; }
    std::size_t individual() const noexcept { return individual_; }

private:
    std::size_t epoch_;
    std::size_t individual_;
};

}  // namespace hsiga
