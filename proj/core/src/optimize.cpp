#include "mfhj/optimize.hpp"

#include <cmath>
#include <limits>

#include "mfhj/errors.hpp"

namespace mfhj::optimize {

LocalMin golden_min(const std::function<double(double)>& f, double a, double b, double x_tol) {
    static const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    static const double invphi2 = 1.0 - invphi;
    double x1 = a + invphi2 * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > x_tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + invphi2 * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? LocalMin{x1, f1} : LocalMin{x2, f2};
}

ScanResult minimize_all(const std::function<double(double)>& f, double a, double b, int n_scan,
                        double x_tol) {
    if (!(b >= a)) {
        throw ValidationError("minimize_all: empty interval");
    }
    ScanResult out;
    if (b - a <= x_tol) {
        const double x = 0.5 * (a + b);
        out.best = {x, f(x)};
        out.minima.push_back(out.best);
        return out;
    }
    n_scan = std::max(n_scan, 8);
    std::vector<double> xs(n_scan + 1), fs(n_scan + 1);
    for (int i = 0; i <= n_scan; ++i) {
        xs[i] = a + (b - a) * i / n_scan;
        fs[i] = f(xs[i]);
    }

    int best_idx = 0;
    for (int i = 1; i <= n_scan; ++i) {
        if (fs[i] < fs[best_idx]) {
            best_idx = i;
        }
    }

    auto push = [&](LocalMin m) {
        // Drop near-duplicates from flat stretches.
        if (!out.minima.empty() && std::abs(m.x - out.minima.back().x) <= 4.0 * x_tol) {
            if (m.value < out.minima.back().value) {
                out.minima.back() = m;
            }
        } else {
            out.minima.push_back(m);
        }
    };
    // Edge cells are refined too: a minimizer hiding between the last two
    // scan points must not read as an edge hit.
    if (fs[0] <= fs[1]) {
        push(golden_min(f, xs[0], xs[1], x_tol));
    }
    for (int i = 1; i < n_scan; ++i) {
        if (fs[i] <= fs[i - 1] && fs[i] <= fs[i + 1]) {
            push(golden_min(f, xs[i - 1], xs[i + 1], x_tol));
        }
    }
    if (fs[n_scan] <= fs[n_scan - 1]) {
        push(golden_min(f, xs[n_scan - 1], xs[n_scan], x_tol));
    }

    out.best = {xs[best_idx], fs[best_idx]};
    for (const auto& m : out.minima) {
        if (m.value <= out.best.value) {
            out.best = m;
        }
    }
    out.lower_edge_best = out.best.x <= a + 4.0 * x_tol;
    out.upper_edge_best = out.best.x >= b - 4.0 * x_tol;
    return out;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, int max_iter) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) {
        return lo;
    }
    if (fhi == 0.0) {
        return hi;
    }
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw SolverError("bisect_root: no sign change on the bracket");
    }
    for (int i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;  // bracket at machine resolution
        }
        const double fmid = f(mid);
        if (fmid == 0.0) {
            return mid;
        }
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ValidationError("least_squares_slope: need two equally sized samples");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return (n * sxy - sx * sy) / denom;
}

}  // namespace mfhj::optimize
