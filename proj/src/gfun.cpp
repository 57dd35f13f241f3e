// SPDX-License-Identifier: Apache-2.0
#include "gapclock/gfun.hpp"

#include <cmath>
#include <stdexcept>

namespace gapclock {

namespace {

double gap_factor(const CoordinateMap& map, int j) {
    return (map.kappa[j + 1] - map.kappa[j - 1]) /
           ((map.kappa[j + 1] - map.kappa[j]) * (map.kappa[j] - map.kappa[j - 1]));
}

}  // namespace

GSolution solve_g(const CoordinateMap& map, const Vec& pmf, const Vec& ktilde, double s) {
    const int M = map.size();
    if (static_cast<int>(pmf.size()) != M || static_cast<int>(ktilde.size()) != M)
        throw std::invalid_argument("solve_g: dimension mismatch");
    if (!(s > 0.0)) throw std::invalid_argument("solve_g: time scale s must be > 0");
    for (double p : pmf)
        if (!(p > 0.0)) throw std::invalid_argument("solve_g: pmf entries must be > 0");

    GSolution sol;
    sol.g_minus.assign(M, 0.0);
    sol.g_plus.assign(M, 0.0);
    const Vec& kap = map.kappa;

    // Forward recursion with running weighted moments of the lower block.
    Vec pre_w(M, 0.0), pre_kw(M, 0.0);  // prefix sums of u_a w_a and kappa_a u_a w_a
    {
        double sw = pmf[0], skw = kap[0] * pmf[0];  // w_0 = 1 (ktilde endpoint 0)
        pre_w[0] = sw;
        pre_kw[0] = skw;
        for (int j = 1; j < M; ++j) {
            if (j < M - 1)
                sol.g_minus[j] = gap_factor(map, j) * (kap[j] * sw - skw) / (s * pmf[j]);
            const double w = 1.0 + s * sol.g_minus[j] * ktilde[j];
            sw += pmf[j] * w;
            skw += kap[j] * pmf[j] * w;
            pre_w[j] = sw;
            pre_kw[j] = skw;
        }
    }

    // Backward recursion with the upper-block moments.
    Vec suf_w(M, 0.0), suf_kw(M, 0.0);  // suffix sums over a >= j
    {
        double sw = pmf[M - 1], skw = kap[M - 1] * pmf[M - 1];
        suf_w[M - 1] = sw;
        suf_kw[M - 1] = skw;
        for (int j = M - 2; j >= 0; --j) {
            if (j >= 1)
                sol.g_plus[j] = gap_factor(map, j) * (skw - kap[j] * sw) / (s * pmf[j]);
            const double w = 1.0 + s * sol.g_plus[j] * ktilde[j];
            sw += pmf[j] * w;
            skw += kap[j] * pmf[j] * w;
            suf_w[j] = sw;
            suf_kw[j] = skw;
        }
    }

    // Scan for the smallest split whose candidate mean brackets itself:
    // x0(split) uses the minus branch strictly below the split and the plus
    // branch at and above it, and must land in (kappa[split-1], kappa[split]].
    int split = -1;
    double x0 = 0.0;
    for (int u = 1; u < M; ++u) {
        const double num = pre_kw[u - 1] + suf_kw[u];
        const double den = pre_w[u - 1] + suf_w[u];
        const double cand = num / den;
        if (kap[u - 1] < cand && cand <= kap[u]) {
            split = u;
            x0 = cand;
            break;
        }
    }
    if (split < 0)
        throw std::runtime_error("solve_g: no split index brackets the weighted mean");

    sol.split = split;
    sol.x0 = x0;
    sol.beta = (x0 - kap[split - 1]) / (kap[split] - kap[split - 1]);
    sol.g.assign(M, 0.0);
    for (int j = 1; j < M - 1; ++j) sol.g[j] = j < split ? sol.g_minus[j] : sol.g_plus[j];

    sol.q = reweight_q(pmf, sol.g, ktilde, s);

    // Re-evaluate the assembled system from scratch for an honest residual.
    double res = 0.0;
    for (int j = 1; j < M - 1; ++j) {
        double sum = 0.0;
        if (j < split) {
            for (int a = 0; a < j; ++a)
                sum += (kap[j] - kap[a]) * pmf[a] * (1.0 + s * sol.g[a] * ktilde[a]);
        } else {
            for (int a = j + 1; a < M; ++a)
                sum += (kap[a] - kap[j]) * pmf[a] * (1.0 + s * sol.g[a] * ktilde[a]);
        }
        const double rhs = gap_factor(map, j) * sum / (s * pmf[j]);
        res = std::max(res, std::abs(sol.g[j] - rhs) / std::max(1.0, std::abs(sol.g[j])));
    }
    sol.residual = res;
    return sol;
}

Vec reweight_q(const Vec& pmf, const Vec& lambda_full, const Vec& ktilde, double s) {
    const int M = static_cast<int>(pmf.size());
    if (static_cast<int>(lambda_full.size()) != M || static_cast<int>(ktilde.size()) != M)
        throw std::invalid_argument("reweight_q: dimension mismatch");
    if (!(s > 0.0)) throw std::invalid_argument("reweight_q: time scale s must be > 0");
    Vec q(M);
    double z = 0.0;
    for (int j = 0; j < M; ++j) {
        if (!(lambda_full[j] >= 0.0) || !(ktilde[j] >= 0.0))
            throw std::invalid_argument("reweight_q: lambda and ktilde must be nonnegative");
        q[j] = pmf[j] * (1.0 + s * ktilde[j] * lambda_full[j]);
        z += q[j];
    }
    for (double& v : q) v /= z;
    return q;
}

}  // namespace gapclock
