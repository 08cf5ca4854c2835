#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace mfhj {

/// Bad inputs: malformed measures, out-of-range parameters, exceeded budgets.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Iterative solver gave up; carries the last iterate and its residual.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what,
                         double last_iterate = std::numeric_limits<double>::quiet_NaN(),
                         double residual = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(what), last_iterate_(last_iterate), residual_(residual) {}

    double last_iterate() const { return last_iterate_; }
    double residual() const { return residual_; }

private:
    double last_iterate_;
    double residual_;
};

}  // namespace mfhj
