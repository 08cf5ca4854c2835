#include "mfhj/single_party.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "mfhj/errors.hpp"
#include "mfhj/optimize.hpp"

namespace mfhj::single_party {

namespace {

constexpr int kScanPoints = 257;
constexpr double kOnAxisTol = 1e-14;
constexpr double kFixedPointTol = 5e-13;

// Sharpen a golden-refined minimizer by bisecting the stationarity
// condition psi(y) = y - x - t*Lambda'(y) inside a small bracket around it.
double polish_minimizer(const SpinMeasure& m, double x, double t, double y, double lo, double hi,
                        double width) {
    const auto psi = [&](double yy) { return yy - x - t * m.tilted(yy).mean; };
    for (int attempt = 0; attempt < 6; ++attempt) {
        const double a = std::max(lo, y - width);
        const double b = std::min(hi, y + width);
        if (psi(a) <= 0.0 && psi(b) >= 0.0) {
            return optimize::bisect_root(psi, a, b);
        }
        width *= 16.0;
    }
    return y;  // keep the golden estimate; stationarity bracket not found
}

Solution assemble(const SpinMeasure& m, double x, double t, double y_star, double phi) {
    Solution s;
    s.minimizer_y = y_star;
    s.action_phi = phi;
    s.pressure_A = -phi;
    s.magnetization_M = (y_star - x) / t;
    s.free_energy_f = phi / t;
    s.residual = std::abs(s.magnetization_M - m.tilted(y_star).mean);
    return s;
}

}  // namespace

double boundary_action(const SpinMeasure& m, double x) { return -m.log_mgf(x); }

double pressure(const SpinMeasure& m, ModelPoint p) {
    p.validate();
    if (p.t == 0.0) {
        return m.log_mgf(p.x);
    }
    return hopf_lax(m, p).pressure_A;
}

Solution hopf_lax(const SpinMeasure& m, ModelPoint p) {
    p.validate();
    if (p.t <= 0.0) {
        throw ValidationError("hopf_lax: requires t > 0 (use boundary_action at t = 0)");
    }
    const double x = p.x;
    const double t = p.t;
    const double lh = m.support_half_width();

    if (lh == 0.0) {  // point mass at 0: Lambda == 0, the heat kernel wins
        Solution s = assemble(m, x, t, x, 0.0);
        return s;
    }

    const double scale = 1.0 + std::abs(x) + t * lh;
    const double edge = 1e-6 * scale;
    const double x_tol = 1e-10 * scale;
    const auto objective = [&](double y) {
        const double d = x - y;
        return d * d / (2.0 * t) - m.log_mgf(y);
    };

    const bool on_axis = std::abs(x) <= kOnAxisTol;
    // The minimizer satisfies y = x + t*Lambda'(y), so it is confined to
    // [x - t*lh, x + t*lh]. On the axis the +/- minimizers mirror each
    // other; searching y >= 0 keeps tiny double wells from being skipped.
    const double lo = on_axis ? 0.0 : x - t * lh - edge;
    const double hi = (on_axis ? 0.0 : x) + t * lh + edge;

    auto scan = optimize::minimize_all(objective, lo, hi, kScanPoints, x_tol);
    if (scan.upper_edge_best || (!on_axis && scan.lower_edge_best)) {
        throw SolverError("hopf_lax: minimizer hit the search boundary (internal error)");
    }

    double y_star, phi_star;
    if (scan.minima.empty()) {
        // Monotone scan toward the axis endpoint: minimum at y = 0.
        y_star = 0.0;
        phi_star = objective(0.0);
    } else {
        const auto best = std::min_element(
            scan.minima.begin(), scan.minima.end(),
            [](const optimize::LocalMin& a, const optimize::LocalMin& b) {
                return a.value < b.value;
            });
        y_star = polish_minimizer(m, x, t, best->x, lo, hi, 64.0 * x_tol);
        phi_star = objective(y_star);
        if (on_axis && objective(0.0) <= phi_star) {
            y_star = 0.0;
            phi_star = objective(0.0);
        }
    }

    if (on_axis) {
        // Branch threshold: below it the axis minimizer is numerically zero.
        const double branch_tol = 1e-7 * scale;
        if (y_star <= branch_tol) {
            Solution s = assemble(m, 0.0, t, 0.0, objective(0.0));
            s.magnetization_M = 0.0;
            s.minimizer_y = 0.0;
            s.residual = 0.0;
            return s;
        }
        Solution s = assemble(m, 0.0, t, y_star, phi_star);
        s.branch_count = 2;
        s.second_branch_M = -s.magnetization_M;
        return s;
    }
    return assemble(m, x, t, y_star, phi_star);
}

double self_consistent_M(const SpinMeasure& m, ModelPoint p, double seed) {
    p.validate();
    const double lh = m.support_half_width();
    if (!std::isfinite(seed) || std::abs(seed) > lh + 1e-12) {
        throw ValidationError("self_consistent_M: |seed| must be <= L/2");
    }
    const double x = p.x;
    const double t = p.t;
    if (t == 0.0 || lh == 0.0) {
        return m.tilted(x).mean;
    }

    const auto map = [&](double M) { return m.tilted(x + t * M).mean; };

    double M = std::clamp(seed, -lh, lh);
    double g = map(M);
    constexpr int kMaxIters = 1500;
    constexpr double kDamping = 0.5;
    for (int i = 0; i < kMaxIters; ++i) {
        if (std::abs(M - g) <= kFixedPointTol) {
            return M;
        }
        M = (1.0 - kDamping) * M + kDamping * g;
        g = map(M);
    }

    // Damped iteration stalled (the map slope approaches 1 near t_c):
    // bisect the residual on the sign-change interval nearest the iterate.
    const double last_iterate = M;
    const auto residual_fn = [&](double MM) { return MM - map(MM); };
    const int grid = 4096;
    double prev_M = -lh;
    double prev_r = residual_fn(prev_M);
    double best_root = std::numeric_limits<double>::quiet_NaN();
    double best_dist = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= grid; ++i) {
        const double cur_M = -lh + 2.0 * lh * i / grid;
        const double cur_r = residual_fn(cur_M);
        if ((prev_r <= 0.0 && cur_r >= 0.0) || (prev_r >= 0.0 && cur_r <= 0.0)) {
            const double root = optimize::bisect_root(residual_fn, prev_M, cur_M);
            const double dist = std::abs(root - last_iterate);
            if (dist < best_dist) {
                best_dist = dist;
                best_root = root;
            }
        }
        prev_M = cur_M;
        prev_r = cur_r;
    }
    if (std::isfinite(best_root)) {
        const double res = std::abs(residual_fn(best_root));
        if (res <= 1e-12) {
            return best_root;
        }
        throw SolverError("self_consistent_M: bisection fallback left a large residual",
                          best_root, res);
    }
    throw SolverError("self_consistent_M: no fixed point found after damped iteration",
                      last_iterate, std::abs(residual_fn(last_iterate)));
}

double free_energy(const SpinMeasure& m, double beta, double h) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ValidationError("free_energy: beta must be positive");
    }
    return hopf_lax(m, ModelPoint::from_field(beta, h)).free_energy_f;
}

CriticalTime critical_time(const SpinMeasure& m) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const double var = m.variance();
    if (!(var > 0.0)) {
        return {kInf, kInf, 0.0, kInf, true};
    }
    const double lh = m.support_half_width();
    const double x_min = 1e-8;
    const double x_max = 10.0 * 2.0 * lh;

    const auto crossing = [&](double x0) { return x0 / m.tilted(x0).mean; };
    const auto slope = [&](double x0) { return m.tilted(x0).mean / x0; };

    const int n = 512;
    std::vector<double> xs(n + 1);
    const double lr = std::log(x_max / x_min);
    for (int i = 0; i <= n; ++i) {
        xs[i] = x_min * std::exp(lr * i / n);
    }

    int best = 0;
    double best_val = crossing(xs[0]);
    for (int i = 1; i <= n; ++i) {
        const double v = crossing(xs[i]);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    CriticalTime out;
    if (best == 0 || best == n) {
        out.t_c = best_val;
        out.argmin_x0 = xs[best];
    } else {
        const auto refined =
            optimize::golden_min(crossing, xs[best - 1], xs[best + 1], 1e-12 * xs[best]);
        out.t_c = refined.value;
        out.argmin_x0 = refined.x;
    }
    // The x0 -> 0 limit of the crossing time is 1/Lambda''(0) exactly; near
    // the left grid edge the ratio is dominated by cancellation noise, so
    // snap to the limit when the scan agrees within the noise floor.
    const double limit = 1.0 / var;
    if (std::abs(out.t_c - limit) <= 1e-7 * std::max(1.0, limit)) {
        out.t_c = limit;
        out.argmin_x0 = 0.0;
    }

    int best_s = 0;
    double best_sval = slope(xs[0]);
    for (int i = 1; i <= n; ++i) {
        const double v = slope(xs[i]);
        if (v > best_sval) {
            best_sval = v;
            best_s = i;
        }
    }
    if (best_s == 0 || best_s == n) {
        out.sup_slope_convention = best_sval;
    } else {
        const auto refined = optimize::golden_min([&](double x0) { return -slope(x0); },
                                                  xs[best_s - 1], xs[best_s + 1],
                                                  1e-12 * xs[best_s]);
        out.sup_slope_convention = -refined.value;
    }
    if (std::abs(out.sup_slope_convention - var) <= 1e-7 * std::max(1.0, var)) {
        out.sup_slope_convention = var;
    }

    out.inv_curvature = 1.0 / var;
    out.consistent =
        std::abs(out.t_c - out.inv_curvature) <= 1e-9 * std::max(1.0, out.inv_curvature);
    return out;
}

}  // namespace mfhj::single_party
