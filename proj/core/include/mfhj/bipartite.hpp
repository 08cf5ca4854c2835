#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mfhj/measure.hpp"

namespace mfhj::bipartite {

/// Two spin families coupled only across families. Fields h1, h2 are the
/// physical ones: every tilt enters as beta*h + coupling, so the alpha = 0
/// limit reduces to a single party in field h1 with pressure Lambda(beta*h1).
struct Params {
    double beta = 1.0;
    double alpha = 1.0;  // relative size N2/N1
    double h1 = 0.0;
    double h2 = 0.0;
    SpinMeasure measure_sigma;
    SpinMeasure measure_tau;

    void validate() const;
    double tilt_sigma(double n) const { return beta * h1 + alpha * beta * n; }
    double tilt_tau(double m) const { return beta * h2 + beta * m; }
};

struct Solution {
    double m_tilde = 0.0;
    double n_tilde = 0.0;
    double d = 0.0;  // m_tilde - alpha * n_tilde
    double pressure_A = 0.0;
    double free_energy_f = 0.0;  // -A / beta, per-N1 normalization
    double residual1 = 0.0;      // |M - mean_sigma(tilt_sigma(N))|
    double residual2 = 0.0;      // |N - mean_tau(tilt_tau(M))|
    int branch_count = 1;
    double trial_value = 0.0;      // trial functional at the solution
    double cross_order_gap = 0.0;  // |min-max value - max-min value|
    bool cross_order_warning = false;
};

/// Solves the coupled pair M = mean_sigma(beta*h1 + alpha*beta*N),
/// N = mean_tau(beta*h2 + beta*M) by damped alternating iteration (with a
/// Newton fallback), then selects among coexisting fixed points the one
/// attaining the min-over-N max-over-M trial value; ties break to M >= 0.
Solution coupled_fixed_point(const Params& p, std::pair<double, double> seed);

/// Limiting pressure A = -alpha*beta*N*M + Lambda_sigma(..) + alpha*Lambda_tau(..)
/// at the selected fixed point.
double pressure(const Params& p);

/// Trial functional alpha*M*N - Lambda_sigma(tilt)/beta - alpha*Lambda_tau(tilt)/beta.
double minmax_trial(const Params& p, double m, double n);

/// max over M of the trial functional at fixed N (the inner problem; the
/// trial is strictly concave in M).
double inner_max_value(const Params& p, double n);

/// Nested optimization min over N of max over M. Returns the same branch as
/// coupled_fixed_point and also evaluates the swapped order, surfacing the
/// gap in cross_order_gap (generically nonzero; warning beyond 1e-8).
Solution minmax_solve(const Params& p);

/// Exact pressure (1/n1) log E exp(-beta*H) by aggregated enumeration over
/// both parties' occupation vectors; requires discrete measures within the
/// joint budget.
double exact_bipartite_pressure(int n1, int n2, const Params& p);

enum class BoundaryVariant { FiniteN, Limit };

/// Action of the interpolating problem at (x, t = beta) computed from the
/// Gaussian representation, with either the size-n boundary (finite-size
/// single-party pressures) or its limit. The boundary sign is fixed so the
/// t -> 0 limit reproduces A1_n(h1 + x) + alpha_n * A2_n(h2 - x) and the
/// x = 0 value reproduces exact enumeration.
double cole_hopf_pressure(const Params& p, int n1, int n2, double x, BoundaryVariant variant);

/// n1 * max-over-x gap between the two boundary variants, per size; bounded
/// sequences confirm the boundary replacement costs O(1/N).
std::vector<double> boundary_equivalence_margins(const Params& p, std::span<const int> n1_list,
                                                 std::span<const double> x_samples);

}  // namespace mfhj::bipartite
