#pragma once

#include <span>
#include <vector>

#include "mfhj/measure.hpp"

namespace mfhj::shock {

/// Straight-line trajectory x(s) = x0 - s * mean(x0) of the free velocity
/// field; crossing_time is the time it reaches x = 0 (+inf when it never
/// does).
struct Characteristic {
    double x0 = 0.0;
    double slope = 0.0;
    double crossing_time = 0.0;
};

Characteristic characteristic(const SpinMeasure& m, double x0);

/// One-sided limits of M across x = 0 on a grid of times, with the jump
/// condition residual |M+ + M-| per time. One-sided limits are read off at
/// x = +/-1e-8; rows below t_c should show residual ~0 and branch_count 1.
struct ShockReport {
    double t_c = 0.0;
    std::vector<double> times;
    std::vector<double> m_plus;
    std::vector<double> m_minus;
    std::vector<double> rh_residuals;
    std::vector<int> branch_counts;  // of the on-axis solution at each time
    int entropy_violations = 0;
    int symmetry_violations = 0;
};

ShockReport detect_shock(const SpinMeasure& m, std::span<const double> t_grid,
                         int entropy_grid_points = 101);

/// Number of adjacent decreases of M (beyond 1e-9) along a strictly
/// increasing x grid at fixed t.
int entropy_scan(const SpinMeasure& m, double t, std::span<const double> x_grid);

/// Violation count of a precomputed magnetization profile.
int count_entropy_violations(std::span<const double> m_values);

/// Tolerances used by detect_shock's verification counters.
constexpr double kJumpSymmetryTol = 1e-7;
constexpr double kNoJumpTol = 1e-8;
constexpr double kOneSidedOffset = 1e-8;

}  // namespace mfhj::shock
