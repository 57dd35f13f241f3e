// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace gapclock {

using Vec = std::vector<double>;

/// Finite state grid i_1 < ... < i_M with M >= 3 states.
struct StateGrid {
    Vec states;

    int size() const { return static_cast<int>(states.size()); }

    /// Gap below state j: states[j] - states[j-1], valid for j in [1, M-1].
    double gap(int j) const { return states[j] - states[j - 1]; }
};

enum class LawKind { Geometric, Exponential, NegBinomial, Gamma, Deterministic };

/// Stopping-time law, mean-matched to the horizon t:
/// Geometric(a) with a = t/(t+h), NegBinomial(r, a) with a = t/(t+h r),
/// Exponential with rate 1/t, Gamma(r, r/t), or the deterministic time t.
struct TimeLaw {
    LawKind kind = LawKind::Exponential;
    double t = 1.0;  ///< horizon; every law has mean t
    int r = 1;       ///< stage count for NegBinomial / Gamma
    double h = 0.0;  ///< step for the discrete laws; 0 means pick automatically
};

const char* law_kind_name(LawKind kind);

/// Complete solver input: grid, target pmf, interior drift and killing, law.
///
/// Drift and killing are given at interior states only (paper convention
/// b(i_1) = b(i_M) = 0); both vectors have size M-2.
struct Instance {
    StateGrid grid;
    Vec probs;
    Vec drift;
    Vec killing;
    TimeLaw law;

    int size() const { return grid.size(); }
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    std::string joined() const;
};

/// One-step branch probabilities q_{j,j+1}, q_{j,j-1}; endpoint entries are 0.
/// Satisfies up[j] + down[j] = 1 exactly on the interior.
struct JumpProbs {
    Vec up;
    Vec down;
};

/// Checks every structural invariant and returns the full list of violations.
/// An empty report means the instance is solvable input.
ValidationReport validate_instance(const Instance& inst);

/// True iff the strict drift bound -1/gap(j+1) < b_j < 1/gap(j) holds everywhere.
bool drift_within_bounds(const StateGrid& grid, const Vec& drift);

/// Branch probabilities from grid gaps and drift.
/// Throws std::invalid_argument if the drift bound fails (the bound is
/// necessary and sufficient for nonnegativity).
JumpProbs jump_probs(const StateGrid& grid, const Vec& drift);

/// Dimensionless killing ktilde_j = gap(j+1) * gap(j) * k_j on the interior,
/// zero at both ends. Throws on negative killing. Returned vector has size M.
Vec ktilde(const StateGrid& grid, const Vec& killing);

/// Full-size (M) drift vector with zero endpoints.
Vec full_drift(const Instance& inst);

/// Full-size (M) lambda vector with zero endpoints from an interior vector.
Vec full_lambda(int M, const Vec& interior);

}  // namespace gapclock
