#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ckdv {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad n, period, length, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The requested operation needs diagonal dispersion but the system couples
/// third derivatives across components.
class NotDiagonal : public Error {
public:
    using Error::Error;
};

/// A change of variables hit a zero eigenvalue or a singular matrix.
class SingularTransform : public Error {
public:
    using Error::Error;
};

/// Raised when a lemma's hypotheses do not hold for the supplied parameters.
/// `constraint()` names the violated inequality.
class HypothesisViolation : public Error {
public:
    HypothesisViolation(std::string lemma, std::string constraint)
        : Error(lemma + ": hypothesis violated: " + constraint),
          constraint_(std::move(constraint)) {}
    const std::string& constraint() const noexcept { return constraint_; }

private:
    std::string constraint_;
};

/// Time stepping produced non-finite values or a mode grew past the guard.
class BlowupDetected : public Error {
public:
    BlowupDetected(const std::string& what, double last_valid_time)
        : Error(what), last_valid_time_(last_valid_time) {}
    double last_valid_time() const noexcept { return last_valid_time_; }

private:
    double last_valid_time_;
};

/// Operation not defined for the given input (e.g. off-diagonal table of a
/// diagonal matrix).
class NotApplicable : public Error {
public:
    using Error::Error;
};

}  // namespace ckdv
