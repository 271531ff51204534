#pragma once

#include <stdexcept>
#include <string>

namespace sparsid {

// Every error thrown by the library derives from Error. The CLI maps the
// concrete type onto its exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Malformed input files (CSV, JSON).
class ParseError : public Error {
public:
    using Error::Error;
};

// Library or problem size beyond the configured cap.
class InfeasibleProblem : public Error {
public:
    using Error::Error;
};

// Fewer observed channels than the model dimension.
class PartialObservation : public Error {
public:
    using Error::Error;
};

// A simulated or integrated state became non-finite.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, long step, double time)
        : Error(what), step_(step), time_(time) {}

    long step() const noexcept { return step_; }
    double time() const noexcept { return time_; }

private:
    long step_;
    double time_;
};

}  // namespace sparsid
