#include "mfhj/bipartite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "mfhj/errors.hpp"
#include "mfhj/finite_n.hpp"
#include "mfhj/optimize.hpp"
#include "mfhj/single_party.hpp"

namespace mfhj::bipartite {

namespace {

constexpr double kFixedPointTol = 5e-13;
constexpr double kCrossOrderTol = 1e-8;

double mean_sigma(const Params& p, double n) { return p.measure_sigma.tilted(p.tilt_sigma(n)).mean; }
double mean_tau(const Params& p, double m) { return p.measure_tau.tilted(p.tilt_tau(m)).mean; }

double trial_value(const Params& p, double m, double n) {
    return p.alpha * m * n - p.measure_sigma.log_mgf(p.tilt_sigma(n)) / p.beta -
           p.alpha * p.measure_tau.log_mgf(p.tilt_tau(m)) / p.beta;
}

double pressure_at(const Params& p, double m, double n) {
    return -p.alpha * p.beta * n * m + p.measure_sigma.log_mgf(p.tilt_sigma(n)) +
           p.alpha * p.measure_tau.log_mgf(p.tilt_tau(m));
}

bool degenerate(const Params& p) {
    return p.alpha == 0.0 || p.measure_sigma.support_half_width() == 0.0 ||
           p.measure_tau.support_half_width() == 0.0;
}

// With alpha = 0 or a zero-variance party the coupling is one-way and the
// composed map m -> mean_sigma(mean_tau(m)) settles in a step or two.
Solution direct_solution(const Params& p) {
    Solution s;
    s.m_tilde = 0.0;
    for (int i = 0; i < 4; ++i) {
        s.m_tilde = mean_sigma(p, mean_tau(p, s.m_tilde));
    }
    s.n_tilde = mean_tau(p, s.m_tilde);
    s.d = s.m_tilde - p.alpha * s.n_tilde;
    s.pressure_A = pressure_at(p, s.m_tilde, s.n_tilde);
    s.free_energy_f = -s.pressure_A / p.beta;
    s.trial_value = trial_value(p, s.m_tilde, s.n_tilde);
    s.residual1 = std::abs(s.m_tilde - mean_sigma(p, s.n_tilde));
    s.residual2 = std::abs(s.n_tilde - mean_tau(p, s.m_tilde));
    return s;
}

struct InnerMax {
    double m = 0.0;
    double value = 0.0;
};

// max over M of the trial at fixed N. d(trial)/dM = alpha*(N - mean_tau(M))
// is strictly decreasing in M, so the maximizer is a root or a box edge.
InnerMax inner_max(const Params& p, double n) {
    const double lsh = p.measure_sigma.support_half_width();
    const auto slope = [&](double m) { return n - mean_tau(p, m); };
    InnerMax out;
    if (slope(lsh) >= 0.0) {
        out.m = lsh;
    } else if (slope(-lsh) <= 0.0) {
        out.m = -lsh;
    } else {
        out.m = optimize::bisect_root(slope, -lsh, lsh);
    }
    out.value = trial_value(p, out.m, n);
    return out;
}

struct OuterMin {
    double n = 0.0;
    double m = 0.0;
    double value = 0.0;
    int tie_count = 1;
};

// min over N of the inner-maximized envelope. The envelope derivative is
// alpha*(M*(N) - mean_sigma(N)) by the envelope theorem.
OuterMin outer_min(const Params& p) {
    const double lth = p.measure_tau.support_half_width();
    const double x_tol = 1e-11 * (1.0 + lth);
    const auto envelope = [&](double n) { return inner_max(p, n).value; };
    auto scan = optimize::minimize_all(envelope, -lth, lth, 257, x_tol);
    if (scan.minima.empty()) {
        throw SolverError("minmax_solve: envelope has no interior minimum");
    }

    const auto derivative = [&](double n) {
        return p.alpha * (inner_max(p, n).m - mean_sigma(p, n));
    };
    std::vector<optimize::LocalMin> refined;
    for (auto w : scan.minima) {
        // Golden only localizes to ~sqrt(eps); sharpen on the envelope
        // derivative, widening the bracket until it straddles the root.
        double width = 64.0 * x_tol;
        for (int attempt = 0; attempt < 8; ++attempt) {
            const double bl = std::max(-lth, w.x - width);
            const double br = std::min(lth, w.x + width);
            if (derivative(bl) <= 0.0 && derivative(br) >= 0.0) {
                w.x = optimize::bisect_root(derivative, bl, br);
                w.value = envelope(w.x);
                break;
            }
            width *= 16.0;
        }
        refined.push_back(w);
    }

    const auto best = std::min_element(refined.begin(), refined.end(),
                                       [](const auto& a, const auto& b) {
                                           return a.value < b.value;
                                       });
    const double tie_tol = 1e-10 * std::max(1.0, std::abs(best->value));
    OuterMin out;
    out.tie_count = 0;
    out.n = best->x;
    for (const auto& w : refined) {
        if (std::abs(w.value - best->value) <= tie_tol) {
            ++out.tie_count;
            if (w.x >= out.n || out.tie_count == 1) {
                out.n = std::max(out.n, w.x);
            }
        }
    }
    const auto inner = inner_max(p, out.n);
    out.m = inner.m;
    out.value = inner.value;
    return out;
}

// Swapped nesting max over M of min over N. The trial is concave in N, so
// the inner minimum sits on a box edge.
double cross_order_value(const Params& p) {
    const double lsh = p.measure_sigma.support_half_width();
    const double lth = p.measure_tau.support_half_width();
    const auto inner_min = [&](double m) {
        return std::min(trial_value(p, m, -lth), trial_value(p, m, lth));
    };
    auto scan = optimize::minimize_all([&](double m) { return -inner_min(m); }, -lsh, lsh, 257,
                                       1e-11 * (1.0 + lsh));
    return -scan.best.value;
}

std::vector<std::pair<double, double>> fixed_points(const Params& p) {
    const double lsh = p.measure_sigma.support_half_width();
    const auto residual = [&](double m) { return m - mean_sigma(p, mean_tau(p, m)); };
    std::vector<std::pair<double, double>> roots;
    const int grid = 1024;
    double prev_m = -lsh;
    double prev_r = residual(prev_m);
    for (int i = 1; i <= grid; ++i) {
        const double cur_m = -lsh + 2.0 * lsh * i / grid;
        const double cur_r = residual(cur_m);
        if ((prev_r <= 0.0 && cur_r >= 0.0) || (prev_r >= 0.0 && cur_r <= 0.0)) {
            const double m = optimize::bisect_root(residual, prev_m, cur_m);
            if (roots.empty() || std::abs(m - roots.back().first) > 1e-9 * (1.0 + lsh)) {
                roots.emplace_back(m, mean_tau(p, m));
            }
        }
        prev_m = cur_m;
        prev_r = cur_r;
    }
    return roots;
}

Solution select_fixed_point(const Params& p, double minmax_value_hint) {
    auto roots = fixed_points(p);
    if (roots.empty()) {
        throw SolverError("coupled_fixed_point: no fixed point located");
    }
    const double tie_tol = 1e-10 * std::max(1.0, std::abs(minmax_value_hint));
    double best_gap = std::numeric_limits<double>::infinity();
    for (const auto& [m, n] : roots) {
        best_gap = std::min(best_gap, std::abs(trial_value(p, m, n) - minmax_value_hint));
    }
    std::pair<double, double> chosen{-std::numeric_limits<double>::infinity(), 0.0};
    int ties = 0;
    for (const auto& [m, n] : roots) {
        if (std::abs(trial_value(p, m, n) - minmax_value_hint) <= best_gap + tie_tol) {
            ++ties;
            if (m > chosen.first) {
                chosen = {m, n};
            }
        }
    }
    Solution s;
    s.m_tilde = chosen.first;
    s.n_tilde = chosen.second;
    s.d = s.m_tilde - p.alpha * s.n_tilde;
    s.pressure_A = pressure_at(p, s.m_tilde, s.n_tilde);
    s.free_energy_f = -s.pressure_A / p.beta;
    s.trial_value = trial_value(p, s.m_tilde, s.n_tilde);
    s.residual1 = std::abs(s.m_tilde - mean_sigma(p, s.n_tilde));
    s.residual2 = std::abs(s.n_tilde - mean_tau(p, s.m_tilde));
    s.branch_count = ties;
    return s;
}

}  // namespace

void Params::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ValidationError("bipartite: beta must be positive");
    }
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw ValidationError("bipartite: alpha must be >= 0");
    }
    if (!std::isfinite(h1) || !std::isfinite(h2)) {
        throw ValidationError("bipartite: fields must be finite");
    }
}

double minmax_trial(const Params& p, double m, double n) {
    p.validate();
    if (std::abs(m) > p.measure_sigma.support_half_width() + 1e-9 ||
        std::abs(n) > p.measure_tau.support_half_width() + 1e-9) {
        throw ValidationError("minmax_trial: (m, n) outside the saturation box");
    }
    return trial_value(p, m, n);
}

double inner_max_value(const Params& p, double n) {
    p.validate();
    return inner_max(p, n).value;
}

Solution coupled_fixed_point(const Params& p, std::pair<double, double> seed) {
    p.validate();
    const double lsh = p.measure_sigma.support_half_width();
    const double lth = p.measure_tau.support_half_width();
    if (!std::isfinite(seed.first) || !std::isfinite(seed.second) ||
        std::abs(seed.first) > lsh + 1e-12 || std::abs(seed.second) > lth + 1e-12) {
        throw ValidationError("coupled_fixed_point: seed outside the saturation box");
    }
    if (degenerate(p)) {
        return direct_solution(p);
    }

    // Damped alternating sweep; a 2x2 Newton with the analytic Jacobian
    // takes over when the map stalls near criticality.
    double m = std::clamp(seed.first, -lsh, lsh);
    double n = std::clamp(seed.second, -lth, lth);
    bool converged = false;
    constexpr double kDamping = 0.5;
    for (int i = 0; i < 800 && !converged; ++i) {
        const double gm = mean_sigma(p, n);
        const double gn = mean_tau(p, m);
        converged = std::abs(m - gm) <= kFixedPointTol && std::abs(n - gn) <= kFixedPointTol;
        m = (1.0 - kDamping) * m + kDamping * gm;
        n = (1.0 - kDamping) * n + kDamping * gn;
    }
    for (int i = 0; i < 80 && !converged; ++i) {
        const auto ts = p.measure_sigma.tilted(p.tilt_sigma(n));
        const auto tt = p.measure_tau.tilted(p.tilt_tau(m));
        const double r1 = m - ts.mean;
        const double r2 = n - tt.mean;
        converged = std::abs(r1) <= kFixedPointTol && std::abs(r2) <= kFixedPointTol;
        // J = [[1, -alpha*beta*Vs], [-beta*Vt, 1]]
        const double j12 = -p.alpha * p.beta * ts.variance;
        const double j21 = -p.beta * tt.variance;
        const double det = 1.0 - j12 * j21;
        if (std::abs(det) < 1e-14) {
            break;
        }
        m = std::clamp(m - (r1 - j12 * r2) / det, -lsh, lsh);
        n = std::clamp(n - (r2 - j21 * r1) / det, -lth, lth);
    }

    // Branch selection is variational regardless of where the iteration
    // landed: pick the fixed point attaining the min-max value.
    const double hint = outer_min(p).value;
    Solution s = select_fixed_point(p, hint);
    const double gap = std::abs(cross_order_value(p) - hint);
    s.cross_order_gap = gap;
    s.cross_order_warning = gap > kCrossOrderTol;
    return s;
}

double pressure(const Params& p) {
    p.validate();
    const double seed_m = 0.3 * p.measure_sigma.support_half_width();
    const double seed_n = 0.3 * p.measure_tau.support_half_width();
    return coupled_fixed_point(p, {seed_m, seed_n}).pressure_A;
}

Solution minmax_solve(const Params& p) {
    p.validate();
    if (degenerate(p)) {
        return direct_solution(p);
    }
    const auto outer = outer_min(p);
    Solution s;
    s.m_tilde = outer.m;
    s.n_tilde = outer.n;
    s.d = s.m_tilde - p.alpha * s.n_tilde;
    s.pressure_A = pressure_at(p, s.m_tilde, s.n_tilde);
    s.free_energy_f = -s.pressure_A / p.beta;
    s.trial_value = outer.value;
    s.residual1 = std::abs(s.m_tilde - mean_sigma(p, s.n_tilde));
    s.residual2 = std::abs(s.n_tilde - mean_tau(p, s.m_tilde));
    s.branch_count = outer.tie_count;
    const double gap = std::abs(cross_order_value(p) - outer.value);
    s.cross_order_gap = gap;
    s.cross_order_warning = gap > kCrossOrderTol;
    return s;
}

double exact_bipartite_pressure(int n1, int n2, const Params& p) {
    p.validate();
    if (n1 < 1 || n2 < 1) {
        throw ValidationError("exact_bipartite_pressure: sizes must be >= 1");
    }
    if (!p.measure_sigma.is_discrete() || !p.measure_tau.is_discrete()) {
        throw ValidationError("exact_bipartite_pressure: both measures must be discrete");
    }
    const double cost = finite_n::enumeration_cost(p.measure_sigma, n1) *
                        finite_n::enumeration_cost(p.measure_tau, n2);
    if (cost > finite_n::kEnumerationBudget) {
        throw ValidationError("exact_bipartite_pressure: joint enumeration budget exceeded");
    }

    struct Term {
        double s;
        double log_w;
    };
    const auto collect = [](const SpinMeasure& meas, int n) {
        std::vector<Term> terms;
        const auto& atoms = meas.atoms();
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
            double s = 0.0, lw = lgam[n];
            for (int i = 0; i < k; ++i) {
                if (c[i] != 0) {
                    s += c[i] * atoms[i].value;
                    lw += c[i] * log_w[i] - lgam[c[i]];
                }
            }
            terms.push_back({s, lw});
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
        return terms;
    };

    const auto sigma_terms = collect(p.measure_sigma, n1);
    const auto tau_terms = collect(p.measure_tau, n2);

    double shift = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto& st : sigma_terms) {
        for (const auto& tt : tau_terms) {
            const double e = st.log_w + tt.log_w + p.beta * st.s * tt.s / n1 +
                             p.beta * p.h1 * st.s + p.beta * p.h2 * tt.s;
            if (e <= shift) {
                sum += std::exp(e - shift);
            } else {
                sum = sum * std::exp(shift - e) + 1.0;
                shift = e;
            }
        }
    }
    return (shift + std::log(sum)) / n1;
}

double cole_hopf_pressure(const Params& p, int n1, int n2, double x, BoundaryVariant variant) {
    p.validate();
    if (n1 < 1 || n2 < 0) {
        throw ValidationError("cole_hopf_pressure: invalid sizes");
    }
    const double t = p.beta;
    const double big_h1 = p.beta * p.h1;
    const double big_h2 = p.beta * p.h2;
    const double alpha_n = n2 > 0 ? static_cast<double>(n2) / n1 : 0.0;

    // Boundary = A1(h1+y) + alpha*A2(h2-y) in mechanical units. The Laplace
    // helper expects G = quadratic + boundary with the boundary NEGATED
    // relative to a pressure, and the pressure of the interpolation is the
    // negative of the resulting action, matching enumeration at x = 0.
    std::function<double(double)> boundary;
    if (variant == BoundaryVariant::FiniteN) {
        boundary = [&, alpha_n](double y) {
            double b = finite_n::phi_n_direct(p.measure_sigma, n1, {big_h1 + y, p.beta});
            if (n2 > 0) {
                b += alpha_n *
                     finite_n::phi_n_direct(p.measure_tau, n2, {big_h2 - y, alpha_n * p.beta});
            }
            return b;
        };
    } else {
        boundary = [&](double y) {
            double b = -single_party::pressure(p.measure_sigma, {big_h1 + y, p.beta});
            if (p.alpha > 0.0) {
                b += -p.alpha *
                     single_party::pressure(p.measure_tau, {big_h2 - y, p.alpha * p.beta});
            }
            return b;
        };
    }
    const double reach = p.measure_sigma.support_half_width() +
                         std::max(p.alpha, alpha_n) * p.measure_tau.support_half_width();
    const double action = finite_n::laplace_log_integral(boundary, x, t, n1, reach);
    return -action;
}

std::vector<double> boundary_equivalence_margins(const Params& p, std::span<const int> n1_list,
                                                 std::span<const double> x_samples) {
    p.validate();
    if (n1_list.empty() || x_samples.empty()) {
        throw ValidationError("boundary_equivalence_margins: empty inputs");
    }
    std::vector<double> margins;
    margins.reserve(n1_list.size());
    for (int n1 : n1_list) {
        const int n2 = static_cast<int>(std::lround(p.alpha * n1));
        double gap = 0.0;
        for (double x : x_samples) {
            const double a = cole_hopf_pressure(p, n1, n2, x, BoundaryVariant::FiniteN);
            const double b = cole_hopf_pressure(p, n1, n2, x, BoundaryVariant::Limit);
            gap = std::max(gap, std::abs(a - b));
        }
        margins.push_back(n1 * gap);
    }
    return margins;
}

}  // namespace mfhj::bipartite
