// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gapclock/instance.hpp"

namespace gapclock {

/// Drift-removing coordinate change kappa_1 < ... < kappa_M.
///
/// In these coordinates the surviving chain jumps up from kappa_j with
/// probability eps_j / (eps_j + eps_{j+1}) where eps_j = kappa_j - kappa_{j-1},
/// i.e. the branch probabilities become pure gap ratios and the process is a
/// martingale. The map is centred at the median index (kappa anchored to 0)
/// and scaled so kappa spans K between two anchor-quantile indices.
struct CoordinateMap {
    Vec kappa;
    int anchor = 0;          ///< 0-based index e with kappa[e] = 0
    int quantile_lo = 0;     ///< 0-based e_-
    int quantile_hi = 0;     ///< 0-based e_+
    double scale = 1.0;      ///< K = (i[e_+] - i[e_-]) or 1
    double anchor_quantile = 0.25;  ///< quantile level actually used

    int size() const { return static_cast<int>(kappa.size()); }
    double eps(int j) const { return kappa[j] - kappa[j - 1]; }
};

/// Builds the coordinate change. The gap products are accumulated in log
/// space; the anchor quantile is halved until the quantile indices are
/// strictly ordered. Throws if the drift bound fails.
CoordinateMap build_kappa(const StateGrid& grid, const Vec& drift, const Vec& pmf,
                          double anchor_quantile = 0.25);

/// Piecewise-linear non-decreasing extension of the node map; clamps to
/// kappa_1 below the grid and kappa_M above it.
double kappa_interpolate(const CoordinateMap& map, const StateGrid& grid, double x);

/// Inverse of the interpolant restricted to [kappa_1, kappa_M]; clamps outside.
double kappa_inverse(const CoordinateMap& map, const StateGrid& grid, double y);

}  // namespace gapclock
