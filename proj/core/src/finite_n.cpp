#include "mfhj/finite_n.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mfhj/errors.hpp"
#include "mfhj/optimize.hpp"
#include "mfhj/quadrature.hpp"
#include "mfhj/single_party.hpp"

namespace mfhj::finite_n {

namespace {

// Streaming log-sum-exp with a running maximum.
struct LogSumExp {
    double shift = -std::numeric_limits<double>::infinity();
    double sum = 0.0;

    void add(double log_term) {
        if (log_term <= shift) {
            sum += std::exp(log_term - shift);
        } else {
            sum = sum * std::exp(shift - log_term) + 1.0;
            shift = log_term;
        }
    }
    double value() const { return shift + std::log(sum); }
};

// Visit every occupation vector (n_1..n_K), sum n, calling f(S, Q, logW)
// with S = sum of values, Q = sum of squares, logW = log multinomial weight.
template <typename F>
void for_each_occupation(const std::vector<Atom>& atoms, int n, F&& f) {
    const int k = static_cast<int>(atoms.size());
    std::vector<double> log_w(k), lgam(n + 1);
    for (int i = 0; i < k; ++i) {
        log_w[i] = std::log(atoms[i].weight);
    }
    for (int i = 0; i <= n; ++i) {
        lgam[i] = std::lgamma(i + 1.0);
    }
    std::vector<int> c(k, 0);
    c[0] = n;
    while (true) {
        double s = 0.0, q = 0.0, lw = lgam[n];
        for (int i = 0; i < k; ++i) {
            if (c[i] != 0) {
                s += c[i] * atoms[i].value;
                q += c[i] * atoms[i].value * atoms[i].value;
                lw += c[i] * log_w[i] - lgam[c[i]];
            }
        }
        f(s, q, lw);

        int i = 0;
        while (i < k - 1 && c[i] == 0) {
            ++i;
        }
        if (i == k - 1) {
            break;
        }
        const int v = c[i];
        c[i] = 0;
        c[0] = v - 1;
        c[i + 1] += 1;
    }
}

void require_enumerable(const SpinMeasure& m, int n) {
    if (!m.is_discrete()) {
        throw ValidationError("finite_n: exact enumeration requires a discrete measure");
    }
    if (n < 1) {
        throw ValidationError("finite_n: n must be >= 1");
    }
    if (!within_budget(m, n)) {
        throw ValidationError("finite_n: enumeration budget exceeded for this (n, K)");
    }
}

}  // namespace

double enumeration_cost(const SpinMeasure& m, int n) {
    const int k = m.atom_count();
    // C(n+K-1, K-1)
    return std::exp(std::lgamma(n + k) - std::lgamma(n + 1.0) - std::lgamma(k));
}

bool within_budget(const SpinMeasure& m, int n) {
    return m.is_discrete() && enumeration_cost(m, n) <= kEnumerationBudget;
}

double log_boltzmann_sum(const SpinMeasure& m, int n, double x, double t,
                         bool subtract_self_overlap) {
    require_enumerable(m, n);
    if (!std::isfinite(x) || !std::isfinite(t)) {
        throw ValidationError("finite_n: coordinates must be finite");
    }
    LogSumExp lse;
    for_each_occupation(m.atoms(), n, [&](double s, double q, double lw) {
        double e = t * s * s / (2.0 * n) + x * s;
        if (subtract_self_overlap) {
            e -= t * q / (2.0 * n);
        }
        lse.add(lw + e);
    });
    return lse.value() / n;
}

double exact_pressure(const SpinMeasure& m, int n, double beta, double h) {
    if (!std::isfinite(beta) || !std::isfinite(h)) {
        throw ValidationError("exact_pressure: beta and h must be finite");
    }
    return log_boltzmann_sum(m, n, beta * h, beta, /*subtract_self_overlap=*/true);
}

double phi_n_direct(const SpinMeasure& m, int n, ModelPoint p) {
    p.validate();
    return -log_boltzmann_sum(m, n, p.x, p.t, /*subtract_self_overlap=*/false);
}

double laplace_log_integral(const std::function<double(double)>& boundary, double x, double t,
                            int n, double reach) {
    const double sigma = std::sqrt(t / n);
    const double delta = 10.0 * sigma;
    const double lo = x - t * reach - delta;
    const double hi = x + t * reach + delta;
    const double scale = 1.0 + std::abs(x) + t * reach;

    const auto g = [&](double y) {
        const double d = x - y;
        return d * d / (2.0 * t) + boundary(y);
    };
    auto scan = optimize::minimize_all(g, lo, hi, 257, 1e-11 * scale);
    const double g_star = scan.best.value;

    // Panels concentrated around each well keep the adaptive pass honest
    // even when the exponent is double-welled.
    std::vector<double> breaks{lo, hi};
    auto add_break = [&](double y) {
        if (y > lo && y < hi) {
            breaks.push_back(y);
        }
    };
    if (scan.minima.empty()) {
        add_break(scan.best.x);
    }
    for (const auto& w : scan.minima) {
        for (double k : {-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0}) {
            add_break(w.x + k * sigma);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const auto integrand = [&](double y) { return std::exp(-n * (g(y) - g_star)); };
    const double j = quadrature::integrate(integrand, breaks, 1e-13);
    return -g_star +
           (0.5 * std::log(n / (2.0 * std::numbers::pi * t)) + std::log(j)) / n;
}

ViscousSolution viscous_solution(const SpinMeasure& m, ModelPoint p, int n) {
    p.validate();
    if (p.t <= 0.0) {
        throw ValidationError("viscous_solution: requires t > 0");
    }
    if (n < 1) {
        throw ValidationError("viscous_solution: n must be >= 1");
    }
    const double x = p.x;
    const double t = p.t;
    const double lh = m.support_half_width();
    const double sigma = std::sqrt(t / n);
    const double delta = 10.0 * sigma;
    const double lo = x - t * lh - delta;
    const double hi = x + t * lh + delta;
    const double scale = 1.0 + std::abs(x) + t * lh;

    const auto g = [&](double y) {
        const double d = x - y;
        return d * d / (2.0 * t) - m.log_mgf(y);
    };
    auto scan = optimize::minimize_all(g, lo, hi, 257, 1e-11 * scale);
    const double g_star = scan.best.value;

    std::vector<double> breaks{lo, hi};
    auto add_break = [&](double y) {
        if (y > lo && y < hi) {
            breaks.push_back(y);
        }
    };
    if (scan.minima.empty()) {
        add_break(scan.best.x);
    }
    for (const auto& w : scan.minima) {
        for (double k : {-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0}) {
            add_break(w.x + k * sigma);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const auto weight = [&](double y) { return std::exp(-n * (g(y) - g_star)); };
    const double j = quadrature::integrate(weight, breaks, 1e-13);
    const auto velocity_num = [&](double y) { return (x - y) / t * weight(y); };
    // The numerator can vanish by symmetry; anchor its tolerance to j.
    const double abs_floor = 1e-14 * j * (lh + std::abs(x) / t + 1.0);
    const double k_num = quadrature::integrate(velocity_num, breaks, 1e-13, abs_floor);

    ViscousSolution out;
    out.phi_n = g_star - (0.5 * std::log(n / (2.0 * std::numbers::pi * t)) + std::log(j)) / n;
    // u_n = d(phi_n)/dx, the heat-kernel average of (x-y)/t; it converges to
    // u = -M.
    out.u_n = k_num / j;
    return out;
}

double phi_n_quadrature(const SpinMeasure& m, ModelPoint p, int n) {
    return viscous_solution(m, p, n).phi_n;
}

double u_n_quadrature(const SpinMeasure& m, ModelPoint p, int n) {
    return viscous_solution(m, p, n).u_n;
}

double lemma1_check(const SpinMeasure& m, ModelPoint p, int n) {
    p.validate();
    const double phi_n = -log_boltzmann_sum(m, n, p.x, p.t, false);
    const double a_n = log_boltzmann_sum(m, n, p.x, p.t, true);
    const double width = m.support_width();
    return width * width * p.t / (2.0 * n) - std::abs(phi_n + a_n);
}

ConvergenceReport convergence_study(const SpinMeasure& m, ModelPoint p,
                                    std::span<const int> n_list) {
    p.validate();
    if (n_list.size() < 4) {
        throw ValidationError("convergence_study: need at least 4 sizes");
    }
    for (std::size_t i = 1; i < n_list.size(); ++i) {
        if (n_list[i] <= n_list[i - 1]) {
            throw ValidationError("convergence_study: n_list must be ascending");
        }
    }
    if (n_list.front() < 1) {
        throw ValidationError("convergence_study: sizes must be >= 1");
    }

    const auto limit = single_party::hopf_lax(m, p);

    ConvergenceReport rep;
    rep.limit_phi = limit.action_phi;
    rep.limit_M = limit.magnetization_M;
    std::vector<double> log_n_phi, log_err_phi, log_n_u, log_err_u;
    for (int n : n_list) {
        const auto sol = viscous_solution(m, p, n);
        rep.n_values.push_back(n);
        rep.phi_n.push_back(sol.phi_n);
        rep.u_n.push_back(sol.u_n);
        const double ep = std::abs(sol.phi_n - limit.action_phi);
        const double eu = std::abs(sol.u_n + limit.magnetization_M);
        rep.errors_phi.push_back(ep);
        rep.errors_u.push_back(eu);
        if (ep > 1e-300) {
            log_n_phi.push_back(std::log(n));
            log_err_phi.push_back(std::log(ep));
        }
        if (eu > 1e-300) {
            log_n_u.push_back(std::log(n));
            log_err_u.push_back(std::log(eu));
        }
        rep.lemma1_margins.push_back(within_budget(m, n)
                                         ? lemma1_check(m, p, n)
                                         : std::numeric_limits<double>::quiet_NaN());
    }
    rep.fitted_slope_phi = log_n_phi.size() >= 2
                               ? optimize::least_squares_slope(log_n_phi, log_err_phi)
                               : std::numeric_limits<double>::quiet_NaN();
    rep.fitted_slope_u = log_n_u.size() >= 2
                             ? optimize::least_squares_slope(log_n_u, log_err_u)
                             : std::numeric_limits<double>::quiet_NaN();
    return rep;
}

}  // namespace mfhj::finite_n
