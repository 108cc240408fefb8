#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gasrank {

// Base of every error raised by the library. The CLI maps the concrete
// type onto an exit code (see exit_code()).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input data is inconsistent with what an operation needs (missing team,
// set mismatch, missing predictor value, ...).
class DataError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain (non-finite strength, empty set).
class DomainError : public Error {
public:
    using Error::Error;
};

// Exact computation requested beyond the configured enumeration cap.
class CapacityError : public Error {
public:
    using Error::Error;
};

// Structural validation of a dataset, coefficient vector or input file.
// Carries every offending entry, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> issues)
        : Error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string out = "validation failed";
        for (const auto& s : issues) {
            out += "\n  - ";
            out += s;
        }
        return out;
    }

    std::vector<std::string> issues_;
};

// Bad command-line or configuration usage.
class UsageError : public Error {
public:
    using Error::Error;
};

// Non-convergence, singular information matrix and similar numerical
// failures. best_so_far optionally carries the best objective value seen.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what, std::vector<double> best_point = {},
                            double best_value = 0.0)
        : Error(what), best_point_(std::move(best_point)), best_value_(best_value) {}

    const std::vector<double>& best_point() const noexcept { return best_point_; }
    double best_value() const noexcept { return best_value_; }

private:
    std::vector<double> best_point_;
    double best_value_;
};

// Exit codes: 0 success, 2 validation/usage, 3 numerical failure.
inline int exit_code(const std::exception& e) {
    if (dynamic_cast<const NumericalError*>(&e)) return 3;
    if (dynamic_cast<const Error*>(&e)) return 2;
    return 1;
}

}  // namespace gasrank
