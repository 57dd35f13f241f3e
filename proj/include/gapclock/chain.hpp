// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gapclock/instance.hpp"

namespace gapclock {

/// Shared per-instance data every chain matrix is built from.
struct ChainContext {
    JumpProbs q;   ///< branch probabilities, endpoints zero
    Vec ktilde;    ///< dimensionless killing, size M, endpoints zero
    int states() const { return static_cast<int>(ktilde.size()); }
};

ChainContext make_chain_context(const Instance& inst);

/// Distribution over {1..M, D}; the cemetery D is the last entry.
struct MixtureState {
    Vec w;
    int states() const { return static_cast<int>(w.size()) - 1; }
    double cemetery() const { return w.back(); }
};

/// Point mass at 0-based grid state j on a chain with M states.
MixtureState delta_state(int M, int j);

/// Two-point start mixture: weight 1-beta on state upper-1 and beta on upper.
MixtureState start_mixture(int M, int upper, double beta);

/// One-step transition matrix for step h over {1..M, D}. Rows sum to 1;
/// requires h < 1 / max_j lambda_j (1 + ktilde_j).
struct TransitionMatrixH {
    int M = 0;
    double h = 0.0;
    Vec lambda;  ///< full size M, endpoints zero
    const ChainContext* ctx = nullptr;

    double at(int j, int k) const;
    std::vector<Vec> dense() const;
};

/// CTMC intensity matrix over {1..M, D}: rows sum to 0, rows for the two grid
/// endpoints and the cemetery are identically zero.
struct IntensityMatrix {
    int M = 0;
    Vec lambda;
    const ChainContext* ctx = nullptr;

    double at(int j, int k) const;
    std::vector<Vec> dense() const;
    double max_exit_rate() const;

    /// y = x * Theta for a row vector x of size M+1.
    Vec apply_left(const Vec& x) const;
};

/// Resolvent matrix I - s*Theta over {1..M, D}; every row sums to 1 and the
/// matrix does not depend on the discretisation step.
struct ResolventMatrix {
    int M = 0;
    double s = 0.0;
    Vec lambda;
    const ChainContext* ctx = nullptr;

    double at(int j, int k) const;
    std::vector<Vec> dense() const;

    /// y = x * N~ for a row vector x of size M+1.
    Vec apply_left(const Vec& x) const;

    /// Solves y * N~ = x in place (one application of the inverse from the
    /// left). The M x M block is tridiagonal and strictly diagonally dominant,
    /// so a Thomas sweep on the transpose is stable; the cemetery column is
    /// back-substituted afterwards.
    void solve_left(Vec& x) const;
};

TransitionMatrixH build_transition(const ChainContext& ctx, const Vec& lambda_full, double h);
IntensityMatrix build_intensity(const ChainContext& ctx, const Vec& lambda_full);
ResolventMatrix build_resolvent(const ChainContext& ctx, const Vec& lambda_full, double s);

/// Law of the chain at an independent Gamma(p, 1/s) time started from the
/// given mixture: start * N~^{-p} via p successive left solves.
MixtureState resolvent_inverse_power(const ResolventMatrix& res, const MixtureState& start,
                                     int p);

/// Law of the chain at the deterministic time t: start * exp(t Theta) by
/// uniformization. Nonnegativity is preserved exactly; for large rate*t the
/// horizon is split into chunks so the Poisson weights never underflow.
MixtureState expm_marginal(const IntensityMatrix& theta, const MixtureState& start, double t);

}  // namespace gapclock
