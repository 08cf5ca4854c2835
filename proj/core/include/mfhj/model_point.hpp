#pragma once

#include <cmath>

#include "mfhj/errors.hpp"

namespace mfhj {

/// Point in the mechanical (x, t) plane. x doubles as the external field h,
/// t as the inverse temperature beta: tilts enter all formulas as x + t*M.
struct ModelPoint {
    double x = 0.0;
    double t = 0.0;

    static ModelPoint from_field(double beta, double h) { return {h, beta}; }

    void validate() const {
        if (!std::isfinite(x) || !std::isfinite(t)) {
            throw ValidationError("ModelPoint: coordinates must be finite");
        }
        if (t < 0.0) {
            throw ValidationError("ModelPoint: t must be >= 0");
        }
    }
};

}  // namespace mfhj
