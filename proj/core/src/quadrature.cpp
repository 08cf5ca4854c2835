#include "mfhj/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "mfhj/errors.hpp"

namespace mfhj::quadrature {

GaussLegendre gauss_legendre(int n) {
    if (n < 1) {
        throw ValidationError("gauss_legendre: need at least one node");
    }
    GaussLegendre out;
    out.nodes.assign(n, 0.0);
    out.weights.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.nodes[i] = -x;
        out.weights[i] = w;
        out.nodes[n - 1 - i] = x;
        out.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        out.nodes[n / 2] = 0.0;
    }
    return out;
}

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa, double m, double fm,
             double b, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double err = left + right - whole;
    if (depth <= 0 || std::abs(err) <= 15.0 * tol) {
        return left + right + err / 15.0;
    }
    return adapt(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
    if (!(b > a)) {
        return 0.0;
    }
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson(fa, fm, fb, b - a);
    return adapt(f, a, fa, m, fm, b, fb, whole, abs_tol, max_depth);
}

double integrate(const std::function<double(double)>& f, std::span<const double> breakpoints,
                 double rel_tol, double abs_floor) {
    if (breakpoints.size() < 2) {
        throw ValidationError("integrate: need at least two breakpoints");
    }
    const int panels = static_cast<int>(breakpoints.size()) - 1;

    double coarse = 0.0;
    for (int i = 0; i < panels; ++i) {
        coarse += adaptive_simpson(f, breakpoints[i], breakpoints[i + 1], 1e-6, 20);
    }
    const double tol =
        std::max({rel_tol * std::abs(coarse) / panels, abs_floor, 1e-320});
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        total += adaptive_simpson(f, breakpoints[i], breakpoints[i + 1], tol);
    }
    return total;
}

}  // namespace mfhj::quadrature
