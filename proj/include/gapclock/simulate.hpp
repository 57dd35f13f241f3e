// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "gapclock/chain.hpp"

namespace gapclock {

/// Splittable per-path random stream. Each path derives its state from
/// (seed, path index) alone, so results are reproducible and independent of
/// how paths are scheduled across threads.
struct PathRng {
    std::uint64_t state;

    PathRng(std::uint64_t seed, std::uint64_t path);
    std::uint64_t next_u64();
    /// Uniform on (0, 1]; never returns 0 so -log(u) is always finite.
    double next_unit();
};

struct SimulateOptions {
    long long n_paths = 100000;
    std::uint64_t seed = 1;
    int threads = 0;  ///< 0 = pick from hardware
};

/// Empirical law of the killed chain at the instance's stopping time, started
/// from the given mixture. Continuous laws sample the holding clock directly;
/// geometric and negative-binomial laws step the discrete chain with step h
/// (the law's h, or half the admissible bound when unset).
MixtureState simulate(const Instance& inst, const Vec& lambda_full, const MixtureState& start,
                      const SimulateOptions& opts);

/// Total variation distance between two mixtures of equal size.
double total_variation(const MixtureState& a, const MixtureState& b);

}  // namespace gapclock
