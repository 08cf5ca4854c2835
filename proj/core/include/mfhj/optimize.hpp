#pragma once

#include <functional>
#include <vector>

namespace mfhj::optimize {

struct LocalMin {
    double x = 0.0;
    double value = 0.0;
};

struct ScanResult {
    std::vector<LocalMin> minima;  // refined interior minima, ascending in x
    LocalMin best;                 // global minimum among minima and endpoints
    bool lower_edge_best = false;  // scan was monotone into the lower edge
    bool upper_edge_best = false;
};

/// Golden-section minimization on [a, b]; stops when the bracket is
/// narrower than x_tol.
LocalMin golden_min(const std::function<double(double)>& f, double a, double b, double x_tol);

/// Coarse scan with n_scan+1 points, then golden refinement of every
/// interior local minimum. Objectives may be multi-welled.
ScanResult minimize_all(const std::function<double(double)>& f, double a, double b, int n_scan,
                        double x_tol);

/// Bisection for a root of f on [lo, hi]; expects f(lo) and f(hi) of
/// opposite sign (or zero). Returns the midpoint of the final bracket.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   int max_iter = 200);

/// Least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mfhj::optimize
