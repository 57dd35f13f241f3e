// SPDX-License-Identifier: Apache-2.0
#include "gapclock/coords.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gapclock {

CoordinateMap build_kappa(const StateGrid& grid, const Vec& drift, const Vec& pmf,
                          double anchor_quantile) {
    const int M = grid.size();
    if (M < 3) throw std::invalid_argument("build_kappa: need at least 3 states");
    if (!(anchor_quantile > 0.0 && anchor_quantile < 0.5))
        throw std::invalid_argument("build_kappa: anchor quantile must lie in (0, 0.5)");
    if (!drift_within_bounds(grid, drift))
        throw std::invalid_argument("build_kappa: drift bound violated");

    // Log-space cumulative gap ratios: L[j] = sum_{k<=j} ln rho_k with
    // rho_k = (1 - gap(k) b_k) / (1 + gap(k+1) b_k), rho_0 = 1 (b endpoint 0).
    Vec L(M - 1, 0.0);
    for (int k = 1; k <= M - 2; ++k) {
        const double b = drift[k - 1];
        L[k] = L[k - 1] + std::log1p(-grid.gap(k) * b) - std::log1p(grid.gap(k + 1) * b);
    }

    // Anchor quantile indices, halving until strictly ordered.
    double aq = anchor_quantile;
    int em = 0, ep = M - 1;
    for (int tries = 0;; ++tries) {
        double prefix = 0.0;
        em = M - 1;
        for (int j = 0; j < M; ++j) {
            prefix += pmf[j];
            if (prefix >= aq) { em = j; break; }
        }
        double suffix = 0.0;
        ep = 0;
        for (int j = M - 1; j >= 0; --j) {
            suffix += pmf[j];
            if (suffix >= aq) { ep = j; break; }
        }
        if (em < ep) break;
        if (tries > 200)
            throw std::runtime_error("build_kappa: no anchor quantile separates e- from e+");
        aq *= 0.5;
    }

    // Median anchor: smallest e with both cumulative halves >= 1/2. The prefix
    // condition alone determines it (the suffix condition then holds).
    int e = M - 1;
    {
        double prefix = 0.0;
        for (int j = 0; j < M; ++j) {
            prefix += pmf[j];
            if (prefix >= 0.5) { e = j; break; }
        }
    }

    const double K = std::max(grid.states[ep] - grid.states[em], 1.0);

    // eps[j] = K * gap(j) e^{L[j-1]} / sum_{a=em..ep-1} gap(a+1) e^{L[a]},
    // with the common exponent shifted out before exponentiation.
    double shift = L[em];
    for (int a = em; a < ep; ++a) shift = std::max(shift, L[a]);
    double denom = 0.0;
    for (int a = em; a < ep; ++a) denom += grid.gap(a + 1) * std::exp(L[a] - shift);

    Vec eps(M, 0.0);
    for (int j = 1; j < M; ++j)
        eps[j] = K * grid.gap(j) * std::exp(L[j - 1] - shift) / denom;

    CoordinateMap map;
    map.kappa.assign(M, 0.0);
    map.anchor = e;
    map.quantile_lo = em;
    map.quantile_hi = ep;
    map.scale = K;
    map.anchor_quantile = aq;
    for (int j = e; j + 1 < M; ++j) map.kappa[j + 1] = map.kappa[j] + eps[j + 1];
    for (int j = e; j > 0; --j) map.kappa[j - 1] = map.kappa[j] - eps[j];

    // The whole point of the construction: branch probabilities must equal the
    // kappa gap ratios. Check it and the span reproduction before returning.
    const JumpProbs q = jump_probs(grid, drift);
    for (int j = 1; j + 1 < M; ++j) {
        const double ratio = map.eps(j) / (map.eps(j) + map.eps(j + 1));
        if (std::abs(ratio - q.up[j]) > 1e-10)
            throw std::runtime_error("build_kappa: gap-ratio reproduction failed");
    }
    if (std::abs((map.kappa[ep] - map.kappa[em]) - K) > 1e-10 * std::max(1.0, K))
        throw std::runtime_error("build_kappa: anchor span reproduction failed");
    return map;
}

double kappa_interpolate(const CoordinateMap& map, const StateGrid& grid, double x) {
    if (x < grid.states.front()) return map.kappa.front();
    if (x >= grid.states.back()) return map.kappa.back();
    const auto it = std::upper_bound(grid.states.begin(), grid.states.end(), x);
    const int j = static_cast<int>(it - grid.states.begin()) - 1;  // x in [i_j, i_{j+1})
    const double w = (x - grid.states[j]) / (grid.states[j + 1] - grid.states[j]);
    return map.kappa[j] + w * (map.kappa[j + 1] - map.kappa[j]);
}

double kappa_inverse(const CoordinateMap& map, const StateGrid& grid, double y) {
    if (y <= map.kappa.front()) return grid.states.front();
    if (y >= map.kappa.back()) return grid.states.back();
    const auto it = std::upper_bound(map.kappa.begin(), map.kappa.end(), y);
    const int j = static_cast<int>(it - map.kappa.begin()) - 1;
    const double w = (y - map.kappa[j]) / (map.kappa[j + 1] - map.kappa[j]);
    return grid.states[j] + w * (grid.states[j + 1] - grid.states[j]);
}

}  // namespace gapclock
