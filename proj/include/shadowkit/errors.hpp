#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shadowkit {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A state was outside the unit interval.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numeric parameter violated an operation's precondition.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A finite representation (interval cap, branch count, precision) was exhausted.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// The interval refinement emptied out: no true orbit stays within eps of the
/// pseudo-orbit. `index` is the first state that could not be reached.
class NotShadowed : public Error {
public:
    NotShadowed(std::size_t index, const std::string& what)
        : Error(what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// The hypotheses of the irregular-point construction fail on the chosen class.
class ConstructionImpossible : public Error {
public:
    using Error::Error;
};

/// Integer bookkeeping of the block schedule overflowed.
class ScheduleError : public Error {
public:
    ScheduleError(std::size_t max_feasible_step, const std::string& what)
        : Error(what), max_feasible_step_(max_feasible_step) {}
    std::size_t max_feasible_step() const noexcept { return max_feasible_step_; }

private:
    std::size_t max_feasible_step_;
};

/// Malformed input file or config.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace shadowkit
