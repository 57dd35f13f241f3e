// SPDX-License-Identifier: Apache-2.0
//
// Test-only helpers: seeded random instances and naive dense linear algebra
// used as an independent reference route for the banded production solves.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gapclock/instance.hpp"

namespace testsup {

using gapclock::Instance;
using gapclock::LawKind;
using gapclock::Vec;
using Mat = std::vector<Vec>;

struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed ^ 0x9E3779B97F4A7C15ULL) {}
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double unit() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
    double range(double lo, double hi) { return lo + unit() * (hi - lo); }
    int uniform_int(int lo, int hi) { return lo + static_cast<int>(next() % (hi - lo + 1)); }
};

/// Valid random instance: random grid, interior pmf bounded away from zero,
/// drift strictly inside its bound, killing in [0, kill_max].
inline Instance random_instance(std::uint64_t seed, int M = 0, double t = 0.0,
                                double kill_max = 2.0) {
    Rng rng(seed);
    Instance inst;
    if (M == 0) M = rng.uniform_int(3, 10);
    inst.grid.states.resize(M);
    inst.grid.states[0] = rng.range(-1.0, 1.0);
    for (int j = 1; j < M; ++j)
        inst.grid.states[j] = inst.grid.states[j - 1] + rng.range(0.3, 1.7);
    inst.probs.resize(M);
    double z = 0.0;
    for (double& p : inst.probs) z += (p = 0.05 + rng.unit());
    for (double& p : inst.probs) p /= z;
    inst.drift.resize(M - 2);
    inst.killing.resize(M - 2);
    for (int j = 1; j + 1 < M; ++j) {
        const double lo = -0.9 / inst.grid.gap(j + 1);
        const double hi = 0.9 / inst.grid.gap(j);
        inst.drift[j - 1] = rng.range(lo, hi);
        inst.killing[j - 1] = rng.unit() * kill_max;
    }
    if (t <= 0.0) {
        const double choices[3] = {0.1, 1.0, 10.0};
        t = choices[rng.uniform_int(0, 2)];
    }
    inst.law.t = t;
    inst.law.kind = LawKind::Exponential;
    return inst;
}

inline double linf(const Vec& a, const Vec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

inline Vec mat_vec_left(const Vec& x, const Mat& A) {
    const std::size_t n = A.size();
    Vec y(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) y[k] += x[j] * A[j][k];
    return y;
}

/// Solves y * A = x by Gaussian elimination with partial pivoting on A^T.
/// Deliberately naive: the reference route for the banded production solve.
inline Vec dense_solve_left(Vec x, Mat A) {
    const int n = static_cast<int>(A.size());
    Mat T(n, Vec(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) T[i][j] = A[j][i];
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(T[r][col]) > std::abs(T[piv][col])) piv = r;
        std::swap(T[piv], T[col]);
        std::swap(x[piv], x[col]);
        if (T[col][col] == 0.0) throw std::runtime_error("dense_solve_left: singular");
        for (int r = col + 1; r < n; ++r) {
            const double f = T[r][col] / T[col][col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) T[r][c] -= f * T[col][c];
            x[r] -= f * x[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = x[r];
        for (int c = r + 1; c < n; ++c) s -= T[r][c] * x[c];
        x[r] = s / T[r][r];
    }
    return x;
}

/// Dense matrix exponential action x * exp(tA) by scaling and squaring with a
/// plain Taylor series; reference route for the uniformized production path.
inline Vec dense_expm_left(const Vec& x, Mat A, double t) {
    const int n = static_cast<int>(A.size());
    double norm = 0.0;
    for (const auto& row : A) {
        double s = 0.0;
        for (double v : row) s += std::abs(v);
        norm = std::max(norm, s);
    }
    int squarings = 0;
    double scale = t;
    while (std::abs(scale) * norm > 0.5) {
        scale *= 0.5;
        ++squarings;
    }
    Mat E(n, Vec(n, 0.0));
    for (int i = 0; i < n; ++i) E[i][i] = 1.0;
    Mat term = E;
    for (int k = 1; k <= 24; ++k) {
        Mat next(n, Vec(n, 0.0));
        for (int i = 0; i < n; ++i)
            for (int l = 0; l < n; ++l) {
                if (term[i][l] == 0.0) continue;
                const double f = term[i][l] * scale / k;
                for (int j = 0; j < n; ++j) next[i][j] += f * A[l][j];
            }
        term = next;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) E[i][j] += term[i][j];
    }
    for (int sq = 0; sq < squarings; ++sq) {
        Mat next(n, Vec(n, 0.0));
        for (int i = 0; i < n; ++i)
            for (int l = 0; l < n; ++l) {
                if (E[i][l] == 0.0) continue;
                for (int j = 0; j < n; ++j) next[i][j] += E[i][l] * E[l][j];
            }
        E = next;
    }
    return mat_vec_left(x, E);
}

}  // namespace testsup
