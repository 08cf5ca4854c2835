#include "mfhj/shock.hpp"

#include <cmath>
#include <limits>

#include "mfhj/errors.hpp"
#include "mfhj/single_party.hpp"

namespace mfhj::shock {

Characteristic characteristic(const SpinMeasure& m, double x0) {
    if (!std::isfinite(x0)) {
        throw ValidationError("characteristic: x0 must be finite");
    }
    const double mean = m.tilted(x0).mean;
    Characteristic c;
    c.x0 = x0;
    c.slope = -mean;
    c.crossing_time = (x0 == 0.0 || mean == 0.0)
                          ? std::numeric_limits<double>::infinity()
                          : x0 / mean;
    return c;
}

int count_entropy_violations(std::span<const double> m_values) {
    int violations = 0;
    for (std::size_t i = 1; i < m_values.size(); ++i) {
        if (m_values[i] - m_values[i - 1] < -1e-9) {
            ++violations;
        }
    }
    return violations;
}

int entropy_scan(const SpinMeasure& m, double t, std::span<const double> x_grid) {
    for (std::size_t i = 1; i < x_grid.size(); ++i) {
        if (!(x_grid[i] > x_grid[i - 1])) {
            throw ValidationError("entropy_scan: x grid must be strictly increasing");
        }
    }
    std::vector<double> values;
    values.reserve(x_grid.size());
    for (double x : x_grid) {
        values.push_back(single_party::hopf_lax(m, {x, t}).magnetization_M);
    }
    return count_entropy_violations(values);
}

ShockReport detect_shock(const SpinMeasure& m, std::span<const double> t_grid,
                         int entropy_grid_points) {
    for (double t : t_grid) {
        if (!(t > 0.0)) {
            throw ValidationError("detect_shock: all t values must be > 0");
        }
    }
    ShockReport rep;
    rep.t_c = single_party::critical_time(m).t_c;
    const double lh = m.support_half_width();

    for (double t : t_grid) {
        const double mp = single_party::hopf_lax(m, {kOneSidedOffset, t}).magnetization_M;
        const double mm = single_party::hopf_lax(m, {-kOneSidedOffset, t}).magnetization_M;
        const auto axis = single_party::hopf_lax(m, {0.0, t});
        const double rh = std::abs(mp + mm);

        rep.times.push_back(t);
        rep.m_plus.push_back(mp);
        rep.m_minus.push_back(mm);
        rep.rh_residuals.push_back(rh);
        rep.branch_counts.push_back(axis.branch_count);

        if (t > rep.t_c) {
            if (rh > kJumpSymmetryTol || mp < 0.0 || axis.branch_count != 2) {
                ++rep.symmetry_violations;
            }
        } else {
            if (rh > kNoJumpTol || axis.branch_count != 1) {
                ++rep.symmetry_violations;
            }
        }

        if (entropy_grid_points >= 3) {
            std::vector<double> xs(entropy_grid_points);
            for (int i = 0; i < entropy_grid_points; ++i) {
                xs[i] = -2.0 * lh + 4.0 * lh * i / (entropy_grid_points - 1);
            }
            rep.entropy_violations += entropy_scan(m, t, xs);
        }
    }
    return rep;
}

}  // namespace mfhj::shock
