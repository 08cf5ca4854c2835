#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mfhj/measure.hpp"
#include "mfhj/model_point.hpp"

namespace mfhj::finite_n {

/// Aggregated enumeration is allowed while C(n+K-1, K-1) stays below this.
constexpr double kEnumerationBudget = 2e6;

/// Number of occupation vectors for n spins over the measure's atoms.
double enumeration_cost(const SpinMeasure& m, int n);
bool within_budget(const SpinMeasure& m, int n);

/// (1/n) log E exp(t*n*m^2/2 + x*n*m - [t*a_n/2]) over exact enumeration of
/// occupation vectors; the bracketed self-overlap term is included when
/// subtract_self_overlap is set. Everything runs in log space.
double log_boltzmann_sum(const SpinMeasure& m, int n, double x, double t,
                         bool subtract_self_overlap);

/// Exact finite-size pressure A_n(beta, h) = (1/n) log E exp(-beta*H_n) with
/// H_n = -n(m^2/2 + h m) + a_n/2.
double exact_pressure(const SpinMeasure& m, int n, double beta, double h);

/// phi_n(x,t) = -(1/n) log E exp(t*n*m^2/2 + x*n*m), by direct enumeration.
double phi_n_direct(const SpinMeasure& m, int n, ModelPoint p);

/// Finite-size action from the Gaussian-integral representation
///   phi_n = -(1/n) log sqrt(n/2 pi t) Int dy exp(-n[(x-y)^2/2t - Lambda(y)]).
/// Agrees with phi_n_direct exactly (Hubbard-Stratonovich) up to quadrature.
double phi_n_quadrature(const SpinMeasure& m, ModelPoint p, int n);

/// Finite-size velocity u_n(x,t), the ratio form with weight (x-y)/t; equals
/// -M up to O(1/sqrt(n)).
double u_n_quadrature(const SpinMeasure& m, ModelPoint p, int n);

struct ViscousSolution {
    double phi_n = 0.0;
    double u_n = 0.0;
};

/// Both quadrature solutions in one pass.
ViscousSolution viscous_solution(const SpinMeasure& m, ModelPoint p, int n);

/// Generic Laplace evaluation of (1/n) log sqrt(n/2 pi t) Int exp(-n G) with
/// G(y) = (x-y)^2/2t + boundary(y); shared with the bipartite module.
double laplace_log_integral(const std::function<double(double)>& boundary, double x, double t,
                            int n, double reach);

/// Margin of the finite-size action bound: L^2 t / 2n - |phi_n + A_n|,
/// with L the full support width and A_n in mechanical coordinates.
double lemma1_check(const SpinMeasure& m, ModelPoint p, int n);

struct ConvergenceReport {
    std::vector<int> n_values;
    std::vector<double> phi_n;
    std::vector<double> u_n;
    std::vector<double> errors_phi;    // |phi_n - phi|
    std::vector<double> errors_u;      // |u_n + M|
    std::vector<double> lemma1_margins;  // NaN when enumeration is unavailable
    double fitted_slope_phi = 0.0;
    double fitted_slope_u = 0.0;
    double limit_phi = 0.0;
    double limit_M = 0.0;
};

/// Error sequences against the Hopf-Lax limit with fitted log-log slopes.
/// n_list must be ascending with at least 4 entries.
ConvergenceReport convergence_study(const SpinMeasure& m, ModelPoint p,
                                    std::span<const int> n_list);

}  // namespace mfhj::finite_n
