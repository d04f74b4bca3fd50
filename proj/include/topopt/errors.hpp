#pragma once

#include <stdexcept>
#include <string>

namespace topopt {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument values (bad sizes, out-of-range parameters).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Linear solve failed (singular or indefinite reduced system).
class SolveError : public Error {
public:
    using Error::Error;
};

// Active-constraint gradients are linearly dependent.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

// Division by a vanishing gradient component (Venkayya scaling).
class ScalingError : public Error {
public:
    using Error::Error;
};

// Constraint cannot be satisfied (all densities saturated).
class FeasibilityError : public Error {
public:
    using Error::Error;
};

// Problem-file syntax error; carries the offending line number.
class ParseError : public Error {
public:
    ParseError(int line, const std::string& msg)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Problem-file semantic error (out-of-range node, bad fraction, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Invariant violation inside the library itself.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace topopt
