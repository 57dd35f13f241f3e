// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gapclock/coords.hpp"

namespace gapclock {

/// Solution of the self-referential intensity system for a target pmf.
///
/// g is zero at both ends and on the interior satisfies
///   s * u_j * g_j = R_j * (lower or upper moment sum of u_a (1 + s g_a kt_a))
/// with R_j the kappa gap factor, the lower sum used below the split and the
/// upper sum at and above it. The split index is the unique bracket of the
/// weighted mean x0 of kappa; beta locates x0 inside its gap.
struct GSolution {
    Vec g;        ///< assembled intensities, size M, endpoints 0
    Vec g_minus;  ///< forward recursion values
    Vec g_plus;   ///< backward recursion values
    int split = 1;       ///< 0-based index of the upper start state (paper l is split+1)
    double x0 = 0.0;     ///< initial point in kappa coordinates
    double beta = 1.0;   ///< weight of the upper start state, in (0, 1]
    Vec q;               ///< killing-reweighted pmf of the assembled solution
    double residual = 0.0;  ///< max pointwise relative residual of the system
};

/// Solves the intensity system by the constructive scan: forward recursion for
/// the lower branch, backward recursion for the upper branch, then the
/// smallest split index whose candidate mean falls in its own kappa gap.
/// Throws if no bracket exists (cannot happen for a valid pmf; indicates a
/// numeric fault).
GSolution solve_g(const CoordinateMap& map, const Vec& pmf, const Vec& ktilde, double s);

/// Killing-reweighted pmf: Q_j proportional to p_j (1 + s kt_j lambda_j).
Vec reweight_q(const Vec& pmf, const Vec& lambda_full, const Vec& ktilde, double s);

}  // namespace gapclock
