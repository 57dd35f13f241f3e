// SPDX-License-Identifier: Apache-2.0
#include "gapclock/string_measure.hpp"

#include <limits>
#include <stdexcept>

namespace gapclock {

double StringMeasureTable::mass(double lo, double hi) const {
    double total = 0.0;
    for (int j = 1; j + 1 < size(); ++j)
        if (states[j] >= lo && states[j] <= hi) total += m[j];
    return total;
}

StringMeasureTable string_measure(const StateGrid& grid, const Vec& lambda_interior) {
    const int M = grid.size();
    if (static_cast<int>(lambda_interior.size()) != M - 2)
        throw std::invalid_argument("string_measure: lambda must have size M-2");
    StringMeasureTable tab;
    tab.states = grid.states;
    tab.m.assign(M, std::numeric_limits<double>::infinity());
    tab.a.assign(M, 0.0);
    tab.lambda.assign(M, 0.0);
    for (int j = 1; j + 1 < M; ++j) {
        const double lam = lambda_interior[j - 1];
        if (!(lam > 0.0))
            throw std::invalid_argument("string_measure: interior lambda must be positive");
        tab.lambda[j] = lam;
        tab.a[j] = lam * grid.gap(j + 1) * grid.gap(j);
        tab.m[j] = (grid.states[j + 1] - grid.states[j - 1]) / tab.a[j];
    }
    return tab;
}

}  // namespace gapclock
