#pragma once

#include <vector>

#include "mfhj/errors.hpp"

namespace mfhj {

/// What to do with inputs that are not symmetric under value negation.
enum class SymmetryPolicy { Strict, Symmetrize };

struct Atom {
    double value = 0.0;
    double weight = 0.0;
};

struct DensitySample {
    double position = 0.0;
    double density = 0.0;
};

/// Statistics of the measure tilted by exp(tilt * sigma):
/// mean = Lambda'(tilt), variance = Lambda''(tilt).
struct TiltedState {
    double tilt = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double log_mgf = 0.0;
};

/// A symmetric probability measure with compact support [-L/2, L/2].
///
/// Discrete measures keep their atoms; continuous ones are tabulated
/// densities integrated with Gauss-Legendre quadrature, so that both kinds
/// reduce to a weighted node list for every moment computation. Instances
/// are immutable and safe to share across threads.
class SpinMeasure {
public:
    enum class Kind { Discrete, Tabulated };

    static constexpr int kDefaultQuadratureNodes = 128;
    static constexpr double kSymmetryTol = 1e-12;

    static SpinMeasure dichotomic();
    static SpinMeasure uniform(double support_width,
                               int quadrature_nodes = kDefaultQuadratureNodes);
    static SpinMeasure equally_spaced_atoms(int count, double support_width);
    static SpinMeasure from_atoms(std::vector<Atom> atoms,
                                  SymmetryPolicy policy = SymmetryPolicy::Strict);
    static SpinMeasure from_density(double support_width, std::vector<DensitySample> table,
                                    int quadrature_nodes = kDefaultQuadratureNodes,
                                    SymmetryPolicy policy = SymmetryPolicy::Strict);

    Kind kind() const { return kind_; }
    bool is_discrete() const { return kind_ == Kind::Discrete; }
    /// Half-width L/2 of the support.
    double support_half_width() const { return half_width_; }
    /// Full support width L.
    double support_width() const { return 2.0 * half_width_; }

    /// Atoms of a discrete measure (throws for tabulated ones).
    const std::vector<Atom>& atoms() const;
    int atom_count() const;

    /// Weighted nodes every expectation is computed over: the atoms
    /// themselves, or the quadrature nodes of a tabulated density.
    const std::vector<Atom>& nodes() const { return nodes_; }
    int quadrature_nodes() const { return quadrature_nodes_; }

    /// Normalized density of a tabulated measure (piecewise linear in the
    /// table, zero outside the support). Throws for discrete measures.
    double density(double s) const;

    /// Lambda(x) = log E[exp(x sigma)]. Computed in max-shifted form so
    /// large |x| neither overflows nor underflows.
    double log_mgf(double x) const;

    /// Mean and variance of the tilted measure, plus Lambda(tilt).
    TiltedState tilted(double tilt) const;

    /// Lambda''(0), the bare variance.
    double variance() const { return tilted(0.0).variance; }

private:
    SpinMeasure() = default;

    Kind kind_ = Kind::Discrete;
    double half_width_ = 0.0;
    int quadrature_nodes_ = 0;
    std::vector<Atom> nodes_;
    std::vector<DensitySample> table_;
};

}  // namespace mfhj
