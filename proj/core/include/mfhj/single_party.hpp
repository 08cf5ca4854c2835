#pragma once

#include <limits>

#include "mfhj/measure.hpp"
#include "mfhj/model_point.hpp"

namespace mfhj::single_party {

/// Thermodynamics of one model point. Conventions:
///   action phi(x,t)   = min_y { (x-y)^2 / 2t - Lambda(y) }
///   velocity u        = (x - y*) / t,  magnetization M = -u
///   pressure A        = -phi,          free energy f = phi / t
/// so the minimizer is y* = x + t*M and M solves M = mean(x + t*M).
struct Solution {
    double minimizer_y = 0.0;
    double action_phi = 0.0;
    double pressure_A = 0.0;
    double magnetization_M = 0.0;
    double free_energy_f = 0.0;
    int branch_count = 1;
    double residual = 0.0;
    /// Mirror branch magnetization when branch_count == 2 (shock line), NaN otherwise.
    double second_branch_M = std::numeric_limits<double>::quiet_NaN();
};

struct CriticalTime {
    /// First characteristic-crossing time at x = 0: inf_{x0>0} x0 / mean(x0).
    double t_c = 0.0;
    /// 1 / Lambda''(0); equals t_c whenever Lambda' is concave on x > 0.
    double inv_curvature = 0.0;
    /// sup_{x0} mean(x0)/x0, the other reading of the crossing-time formula.
    double sup_slope_convention = 0.0;
    /// x0 attaining the crossing-time infimum (left grid edge when the
    /// infimum is at x0 -> 0).
    double argmin_x0 = 0.0;
    /// True when |t_c - 1/Lambda''(0)| <= 1e-9; false flags a non-concave
    /// Lambda' (first-order transition candidate).
    bool consistent = true;
};

/// Hopf-Lax evaluation at p (requires p.t > 0). On the shock line x = 0,
/// t > t_c both branches minimize; the nonnegative-M branch is reported as
/// primary with branch_count = 2.
Solution hopf_lax(const SpinMeasure& m, ModelPoint p);

/// phi(x, 0) = -Lambda(x).
double boundary_action(const SpinMeasure& m, double x);

/// Solves M = mean(x + t*M) by damped iteration (omega = 0.5) with a
/// bisection fallback; |M - mean(x + t*M)| <= 1e-12 on success.
double self_consistent_M(const SpinMeasure& m, ModelPoint p, double seed);

/// f(beta, h) = phi(h, beta) / beta.
double free_energy(const SpinMeasure& m, double beta, double h);

/// Pressure A(x, t) = -phi(x, t), and its t = 0 value Lambda(x).
double pressure(const SpinMeasure& m, ModelPoint p);

/// Critical time of the shock line. Zero-variance measures have no
/// transition: every field of the result is +infinity.
CriticalTime critical_time(const SpinMeasure& m);

}  // namespace mfhj::single_party
