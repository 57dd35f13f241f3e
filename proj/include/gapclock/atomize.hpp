// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>

#include "gapclock/solvers.hpp"

namespace gapclock {

/// One summand of a target-measure mixture.
struct MeasureComponent {
    enum class Kind { Point, Uniform, TruncNormal, QuantileTable };
    Kind kind = Kind::Point;
    double weight = 1.0;
    double x = 0.0;             ///< point mass location
    double lo = 0.0, hi = 1.0;  ///< support bounds for uniform / truncated normal
    double mean = 0.0, sigma = 1.0;
    Vec levels, values;         ///< quantile table: levels 0=q_0<...<q_n=1, values ascending
};

/// Closed support interval; degenerate intervals are isolated points.
struct SupportInterval {
    double lo = 0.0, hi = 0.0;
};

/// Probability measure given as a mixture of primitives.
struct Measure {
    std::vector<MeasureComponent> components;

    void validate() const;  ///< throws std::invalid_argument on a malformed mixture

    double cdf(double x) const;          ///< mass of (-inf, x]
    double quantile(double p) const;     ///< inf{x : cdf(x) >= p}; exact at atoms
    double density(double x) const;      ///< absolutely continuous part
    double atom_mass_at(double x) const;
    double support_lo() const;
    double support_hi() const;
    std::vector<std::pair<double, double>> atom_list() const;  ///< merged (x, mass)
    std::vector<SupportInterval> support_intervals() const;    ///< sorted, disjoint
    std::vector<double> breakpoints() const;  ///< structural x points, sorted unique
};

/// Piecewise-constant field density plus optional point atoms.
struct FieldTable {
    struct Piece {
        double lo = 0.0, hi = 0.0, value = 0.0;
    };
    struct Atom {
        double x = 0.0, w = 0.0;
    };
    std::vector<Piece> pieces;
    std::vector<Atom> atoms;

    double density(double x) const;
    double atom_at(double x) const;
};

/// Continuous problem data: target measure, drift and killing fields, law.
struct ContinuousSpec {
    Measure measure;
    FieldTable drift;
    FieldTable killing;
    TimeLaw law;
};

struct AtomizedInstance {
    int level = 0;
    Instance instance;
};

enum class FReading { Literal, Atoms };

/// Numeric evidence for the drift/killing/measure hypothesis.
struct HypothesisReport {
    double neighborhood_sup = 0.0;  ///< sup of |drift| neighborhood mass (part 2)
    double gamma = 0.5;
    double c_gamma = 0.0;
    double part3_literal = 0.0;  ///< double integral, trivial-partition supremum
    double part3_atoms = 0.0;    ///< double integral, squared-atom reading
    bool part2_pass = true;
    bool part3_pass = true;
    bool part4_pass = true;
    Vec part4_probe_x;      ///< tail probe locations (outermost first)
    Vec part4_probe_value;  ///< dK/dmu at the probes
    bool all_pass() const { return part2_pass && part3_pass && part4_pass; }
};

/// Weight function of the part-3 integrability check, c(x) = (ln(1/x)-(1-x))/(1-x)^2.
double part3_weight(double x);

/// Radon-Nikodym derivative dK/dmu at x, 0 beyond the support by convention.
double killing_per_mass(const ContinuousSpec& spec, double x);

/// Quantile atomization at refinement level N: grid by successive 2^-N mass
/// thresholds, mass-conserving last bin, drift and killing by the open- and
/// half-open-interval averages. Throws if fewer than 3 atoms result, naming
/// the minimum usable level when one exists.
AtomizedInstance atomize(const ContinuousSpec& spec, int level);

/// Grid-averaged drift and killing (interior vectors of size M-2).
std::pair<Vec, Vec> discretize_fields(const ContinuousSpec& spec, const StateGrid& grid);

HypothesisReport hypothesis_check(const ContinuousSpec& spec);

struct SweepLevel {
    int level = 0;
    int states = 0;
    bool solved = false;
    std::string error;  ///< set when the level failed to atomize/validate/solve
    Solution solution;
    double kappa_abs_moment = 0.0;  ///< sum_j |kappa_j| p_j
    double drift_margin = 0.0;      ///< min distance of drift to its strict bound
};

struct SweepReport {
    HypothesisReport hypothesis;
    bool gated = false;  ///< hypothesis failed, nothing was solved
    std::vector<SweepLevel> levels;
    Vec discrepancy;  ///< interior string-measure gap between consecutive levels
    bool discrepancy_decreasing = false;
    double window_lo = 0.0, window_hi = 0.0;
};

/// Solves the atomized problem at every level in [n_lo, n_hi] and measures the
/// interior string-measure discrepancy between consecutive levels on a probe
/// window. A failed hypothesis check gates the sweep before any solving.
SweepReport refinement_sweep(const ContinuousSpec& spec, int n_lo, int n_hi,
                             const SolverOptions& opts = {});

}  // namespace gapclock
