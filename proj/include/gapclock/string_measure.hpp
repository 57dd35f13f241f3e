// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gapclock/instance.hpp"

namespace gapclock {

/// Discrete string measure: atom m_j = (i_{j+1} - i_{j-1}) / a_j at each
/// interior state, with a_j = lambda_j (i_{j+1} - i_j)(i_j - i_{j-1}).
/// The two endpoint atoms are infinite; all arrays have full size M and carry
/// +inf (m) and 0 (a, lambda) at the ends.
struct StringMeasureTable {
    Vec states;
    Vec m;
    Vec a;
    Vec lambda;

    int size() const { return static_cast<int>(states.size()); }

    /// Mass of the interior atoms lying in [lo, hi].
    double mass(double lo, double hi) const;
};

/// Builds the table from a solved intensity vector (interior entries must be
/// strictly positive).
StringMeasureTable string_measure(const StateGrid& grid, const Vec& lambda_interior);

}  // namespace gapclock
