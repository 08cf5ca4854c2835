#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mfhj::quadrature {

struct GaussLegendre {
    std::vector<double> nodes;    // on [-1, 1], ascending, symmetric
    std::vector<double> weights;  // sum to 2
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
GaussLegendre gauss_legendre(int n);

/// Adaptive Simpson integration of f over [a, b] to absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 48);

/// Integrate over consecutive panels [b0,b1], [b1,b2], ... A first pass sets
/// the scale, a second pass refines to rel_tol of it (never below abs_floor).
double integrate(const std::function<double(double)>& f, std::span<const double> breakpoints,
                 double rel_tol, double abs_floor = 1e-300);

}  // namespace mfhj::quadrature
