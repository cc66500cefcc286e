#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cranhet {

// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed config / spec file content.
class ParseError : public Error {
public:
    using Error::Error;
};

// Filesystem failures, always carrying the offending path in the message.
class IoError : public Error {
public:
    using Error::Error;
};

// Precondition violations on API calls.
class InvalidArgError : public Error {
public:
    using Error::Error;
};

// An inner solver failed to converge. Carries the best iterate and its
// residual so callers can inspect how close the run got.
class SolverError : public Error {
public:
    SolverError(const std::string& msg, std::vector<double> best_iterate,
                double residual, int iterations)
        : Error(msg),
          best_iterate(std::move(best_iterate)),
          residual(residual),
          iterations(iterations) {}

    std::vector<double> best_iterate;
    double residual = 0.0;
    int iterations = 0;
};

} // namespace cranhet
