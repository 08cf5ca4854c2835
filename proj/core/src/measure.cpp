#include "mfhj/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfhj/quadrature.hpp"

namespace mfhj {

namespace {

constexpr double kMergeTol = 1e-12;

void require_finite_atoms(const std::vector<Atom>& atoms) {
    if (atoms.empty()) {
        throw ValidationError("SpinMeasure: atom list is empty");
    }
    for (const auto& a : atoms) {
        if (!std::isfinite(a.value) || !std::isfinite(a.weight)) {
            throw ValidationError("SpinMeasure: atoms must have finite value and weight");
        }
        if (a.weight < 0.0) {
            throw ValidationError("SpinMeasure: atom weights must be nonnegative");
        }
    }
}

// Sort by value and merge atoms closer than kMergeTol; drop zero weights.
std::vector<Atom> canonicalize(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });
    std::vector<Atom> merged;
    for (const auto& a : atoms) {
        if (!merged.empty() && std::abs(a.value - merged.back().value) <= kMergeTol) {
            double w = merged.back().weight + a.weight;
            if (w > 0.0) {
                merged.back().value =
                    (merged.back().value * merged.back().weight + a.value * a.weight) / w;
            }
            merged.back().weight = w;
        } else {
            merged.push_back(a);
        }
    }
    std::erase_if(merged, [](const Atom& a) { return a.weight == 0.0; });
    if (merged.empty()) {
        throw ValidationError("SpinMeasure: all atoms have zero weight");
    }
    return merged;
}

}  // namespace

const std::vector<Atom>& SpinMeasure::atoms() const {
    if (kind_ != Kind::Discrete) {
        throw ValidationError("SpinMeasure: atoms() requires a discrete measure");
    }
    return nodes_;
}

int SpinMeasure::atom_count() const { return static_cast<int>(atoms().size()); }

double SpinMeasure::density(double s) const {
    if (kind_ != Kind::Tabulated) {
        throw ValidationError("SpinMeasure: density() requires a tabulated measure");
    }
    if (s < table_.front().position || s > table_.back().position) {
        return 0.0;
    }
    auto it = std::lower_bound(table_.begin(), table_.end(), s,
                               [](const DensitySample& d, double v) { return d.position < v; });
    if (it == table_.begin()) {
        return it->density;
    }
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double span = hi.position - lo.position;
    if (span <= 0.0) {
        return lo.density;
    }
    const double u = (s - lo.position) / span;
    return lo.density + u * (hi.density - lo.density);
}

double SpinMeasure::log_mgf(double x) const {
    if (!std::isfinite(x)) {
        throw ValidationError("SpinMeasure::log_mgf: x must be finite");
    }
    double shift = -std::numeric_limits<double>::infinity();
    for (const auto& a : nodes_) {
        shift = std::max(shift, x * a.value);
    }
    double sum = 0.0;
    for (const auto& a : nodes_) {
        sum += a.weight * std::exp(x * a.value - shift);
    }
    return shift + std::log(sum);
}

TiltedState SpinMeasure::tilted(double tilt) const {
    if (!std::isfinite(tilt)) {
        throw ValidationError("SpinMeasure::tilted: tilt must be finite");
    }
    double shift = -std::numeric_limits<double>::infinity();
    for (const auto& a : nodes_) {
        shift = std::max(shift, tilt * a.value);
    }
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (const auto& a : nodes_) {
        const double w = a.weight * std::exp(tilt * a.value - shift);
        s0 += w;
        s1 += w * a.value;
        s2 += w * a.value * a.value;
    }
    TiltedState out;
    out.tilt = tilt;
    out.mean = s1 / s0;
    out.variance = std::max(0.0, s2 / s0 - out.mean * out.mean);
    out.log_mgf = shift + std::log(s0);
    return out;
}

SpinMeasure SpinMeasure::dichotomic() {
    return from_atoms({{-1.0, 0.5}, {1.0, 0.5}});
}

SpinMeasure SpinMeasure::equally_spaced_atoms(int count, double support_width) {
    if (count < 2) {
        throw ValidationError("equally_spaced_atoms: need at least 2 atoms");
    }
    if (!(support_width > 0.0) || !std::isfinite(support_width)) {
        throw ValidationError("equally_spaced_atoms: support width must be positive");
    }
    std::vector<Atom> atoms;
    atoms.reserve(count);
    const double w = 1.0 / count;
    for (int i = 0; i < count; ++i) {
        const double v =
            static_cast<double>(2 * i - (count - 1)) * support_width / (2.0 * (count - 1));
        atoms.push_back({v, w});
    }
    return from_atoms(std::move(atoms));
}

SpinMeasure SpinMeasure::from_atoms(std::vector<Atom> atoms, SymmetryPolicy policy) {
    require_finite_atoms(atoms);
    auto merged = canonicalize(std::move(atoms));

    if (policy == SymmetryPolicy::Symmetrize) {
        std::vector<Atom> mirrored;
        mirrored.reserve(2 * merged.size());
        for (const auto& a : merged) {
            mirrored.push_back({a.value, 0.5 * a.weight});
            mirrored.push_back({-a.value, 0.5 * a.weight});
        }
        merged = canonicalize(std::move(mirrored));
    }

    double total = 0.0, scale = 1.0;
    for (const auto& a : merged) {
        total += a.weight;
        scale = std::max(scale, std::abs(a.value));
    }

    // Pairwise symmetry check: after sorting, atom i must mirror atom n-1-i.
    const std::size_t n = merged.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Atom& a = merged[i];
        const Atom& b = merged[n - 1 - i];
        if (std::abs(a.value + b.value) > kSymmetryTol * scale ||
            std::abs(a.weight - b.weight) > kSymmetryTol * total) {
            throw ValidationError(
                "SpinMeasure: atoms are not symmetric under negation "
                "(pass SymmetryPolicy::Symmetrize to repair)");
        }
    }

    // Make the symmetry exact and normalize.
    for (std::size_t i = 0; i < n / 2; ++i) {
        Atom& a = merged[i];
        Atom& b = merged[n - 1 - i];
        const double v = 0.5 * (b.value - a.value);
        const double w = 0.5 * (a.weight + b.weight);
        a.value = -v;
        b.value = v;
        a.weight = w;
        b.weight = w;
    }
    if (n % 2 == 1) {
        merged[n / 2].value = 0.0;
    }
    for (auto& a : merged) {
        a.weight /= total;
    }

    SpinMeasure m;
    m.kind_ = Kind::Discrete;
    m.nodes_ = std::move(merged);
    m.half_width_ = std::abs(m.nodes_.back().value);
    return m;
}

SpinMeasure SpinMeasure::uniform(double support_width, int quadrature_nodes) {
    if (!(support_width > 0.0) || !std::isfinite(support_width)) {
        throw ValidationError("uniform: support width must be positive");
    }
    const double half = 0.5 * support_width;
    const double d = 1.0 / support_width;
    return from_density(support_width, {{-half, d}, {half, d}}, quadrature_nodes);
}

SpinMeasure SpinMeasure::from_density(double support_width, std::vector<DensitySample> table,
                                      int quadrature_nodes, SymmetryPolicy policy) {
    if (!(support_width > 0.0) || !std::isfinite(support_width)) {
        throw ValidationError("from_density: support width must be positive");
    }
    if (table.size() < 2) {
        throw ValidationError("from_density: need at least 2 table samples");
    }
    if (quadrature_nodes < 4) {
        throw ValidationError("from_density: need at least 4 quadrature nodes");
    }
    const double half = 0.5 * support_width;
    double max_d = 0.0;
    for (const auto& s : table) {
        if (!std::isfinite(s.position) || !std::isfinite(s.density)) {
            throw ValidationError("from_density: table entries must be finite");
        }
        if (s.position < -half - kSymmetryTol || s.position > half + kSymmetryTol) {
            throw ValidationError("from_density: sample position outside declared support");
        }
        if (s.density < -kSymmetryTol) {
            throw ValidationError("from_density: density must be nonnegative");
        }
        max_d = std::max(max_d, s.density);
    }
    if (max_d <= 0.0) {
        throw ValidationError("from_density: density vanishes identically");
    }

    std::sort(table.begin(), table.end(), [](const DensitySample& a, const DensitySample& b) {
        return a.position < b.position;
    });
    for (auto& s : table) {
        s.density = std::max(0.0, s.density);
    }

    SpinMeasure m;
    m.kind_ = Kind::Tabulated;
    m.half_width_ = half;
    m.quadrature_nodes_ = quadrature_nodes;
    m.table_ = std::move(table);

    // Symmetry is checked (or enforced) on the interpolant, then the table
    // is rebuilt on a mirrored position set so density(s) == density(-s)
    // holds exactly.
    std::vector<double> positions;
    positions.reserve(2 * m.table_.size());
    for (const auto& s : m.table_) {
        positions.push_back(std::abs(s.position));
    }
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end(),
                                [](double a, double b) { return std::abs(a - b) <= kMergeTol; }),
                    positions.end());

    std::vector<DensitySample> symmetric;
    for (double p : positions) {
        const double dp = m.density(p);
        const double dm = m.density(-p);
        if (policy == SymmetryPolicy::Strict && std::abs(dp - dm) > kSymmetryTol * max_d) {
            throw ValidationError(
                "SpinMeasure: density is not symmetric "
                "(pass SymmetryPolicy::Symmetrize to repair)");
        }
        const double avg = 0.5 * (dp + dm);
        if (p <= kMergeTol) {
            symmetric.push_back({0.0, avg});
        } else {
            symmetric.push_back({-p, avg});
            symmetric.push_back({p, avg});
        }
    }
    std::sort(symmetric.begin(), symmetric.end(),
              [](const DensitySample& a, const DensitySample& b) {
                  return a.position < b.position;
              });
    m.table_ = std::move(symmetric);

    // Effective nodes: Gauss-Legendre on [-L/2, L/2] weighted by the density.
    const auto gl = quadrature::gauss_legendre(quadrature_nodes);
    std::vector<Atom> nodes(quadrature_nodes);
    for (int i = 0; i < quadrature_nodes; ++i) {
        const double y = half * gl.nodes[i];
        nodes[i] = {y, half * gl.weights[i] * m.density(y)};
    }
    // Exact +/- pairing of the node set.
    const std::size_t n = nodes.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        const double v = 0.5 * (nodes[n - 1 - i].value - nodes[i].value);
        const double w = 0.5 * (nodes[i].weight + nodes[n - 1 - i].weight);
        nodes[i] = {-v, w};
        nodes[n - 1 - i] = {v, w};
    }
    if (n % 2 == 1) {
        nodes[n / 2].value = 0.0;
    }
    double total = 0.0;
    for (const auto& a : nodes) {
        total += a.weight;
    }
    if (!(total > 0.0)) {
        throw ValidationError("from_density: quadrature mass is not positive");
    }
    for (auto& a : nodes) {
        a.weight /= total;
    }
    // Rescale the stored table so density() integrates to ~1 as well.
    for (auto& s : m.table_) {
        s.density /= total;
    }
    m.nodes_ = std::move(nodes);
    return m;
}

}  // namespace mfhj
