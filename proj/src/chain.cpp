// SPDX-License-Identifier: Apache-2.0
#include "gapclock/chain.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gapclock {

namespace {

void check_lambda(const ChainContext& ctx, const Vec& lambda) {
    const int M = ctx.states();
    if (static_cast<int>(lambda.size()) != M)
        throw std::invalid_argument("lambda must have full size M with zero endpoints");
    if (lambda.front() != 0.0 || lambda.back() != 0.0)
        throw std::invalid_argument("lambda endpoints must be zero");
    for (double l : lambda)
        if (!(l >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
}

}  // namespace

ChainContext make_chain_context(const Instance& inst) {
    return ChainContext{jump_probs(inst.grid, inst.drift), ktilde(inst.grid, inst.killing)};
}

MixtureState delta_state(int M, int j) {
    MixtureState s{Vec(M + 1, 0.0)};
    s.w[j] = 1.0;
    return s;
}

MixtureState start_mixture(int M, int upper, double beta) {
    if (upper < 1 || upper >= M) throw std::invalid_argument("start_mixture: bad split index");
    MixtureState s{Vec(M + 1, 0.0)};
    s.w[upper] = beta;
    s.w[upper - 1] = 1.0 - beta;
    return s;
}

double TransitionMatrixH::at(int j, int k) const {
    const int c = M;
    if (j == c) return k == c ? 1.0 : 0.0;
    if (j == 0 || j == M - 1) return k == j ? 1.0 : 0.0;
    if (k == j) return 1.0 - lambda[j] * (1.0 + ctx->ktilde[j]) * h;
    if (k == j + 1) return h * lambda[j] * ctx->q.up[j];
    if (k == j - 1) return h * lambda[j] * ctx->q.down[j];
    if (k == c) return h * lambda[j] * ctx->ktilde[j];
    return 0.0;
}

std::vector<Vec> TransitionMatrixH::dense() const {
    std::vector<Vec> rows(M + 1, Vec(M + 1, 0.0));
    for (int j = 0; j <= M; ++j)
        for (int k = 0; k <= M; ++k) rows[j][k] = at(j, k);
    return rows;
}

double IntensityMatrix::at(int j, int k) const {
    const int c = M;
    if (j == c || j == 0 || j == M - 1) return 0.0;
    if (k == j) return -lambda[j] * (1.0 + ctx->ktilde[j]);
    if (k == j + 1) return lambda[j] * ctx->q.up[j];
    if (k == j - 1) return lambda[j] * ctx->q.down[j];
    if (k == c) return lambda[j] * ctx->ktilde[j];
    return 0.0;
}

std::vector<Vec> IntensityMatrix::dense() const {
    std::vector<Vec> rows(M + 1, Vec(M + 1, 0.0));
    for (int j = 0; j <= M; ++j)
        for (int k = 0; k <= M; ++k) rows[j][k] = at(j, k);
    return rows;
}

double IntensityMatrix::max_exit_rate() const {
    double r = 0.0;
    for (int j = 1; j + 1 < M; ++j) r = std::max(r, lambda[j] * (1.0 + ctx->ktilde[j]));
    return r;
}

Vec IntensityMatrix::apply_left(const Vec& x) const {
    Vec y(M + 1, 0.0);
    for (int j = 1; j + 1 < M; ++j) {
        const double flow = x[j] * lambda[j];
        y[j] -= flow * (1.0 + ctx->ktilde[j]);
        y[j + 1] += flow * ctx->q.up[j];
        y[j - 1] += flow * ctx->q.down[j];
        y[M] += flow * ctx->ktilde[j];
    }
    return y;
}

double ResolventMatrix::at(int j, int k) const {
    const int c = M;
    if (j == c) return k == c ? 1.0 : 0.0;
    if (j == 0 || j == M - 1) return k == j ? 1.0 : 0.0;
    if (k == j) return 1.0 + s * lambda[j] * (1.0 + ctx->ktilde[j]);
    if (k == j + 1) return -s * lambda[j] * ctx->q.up[j];
    if (k == j - 1) return -s * lambda[j] * ctx->q.down[j];
    if (k == c) return -s * lambda[j] * ctx->ktilde[j];
    return 0.0;
}

std::vector<Vec> ResolventMatrix::dense() const {
    std::vector<Vec> rows(M + 1, Vec(M + 1, 0.0));
    for (int j = 0; j <= M; ++j)
        for (int k = 0; k <= M; ++k) rows[j][k] = at(j, k);
    return rows;
}

Vec ResolventMatrix::apply_left(const Vec& x) const {
    Vec y(x);
    for (int j = 1; j + 1 < M; ++j) {
        const double flow = s * x[j] * lambda[j];
        y[j] += flow * (1.0 + ctx->ktilde[j]);
        y[j + 1] -= flow * ctx->q.up[j];
        y[j - 1] -= flow * ctx->q.down[j];
        y[M] -= flow * ctx->ktilde[j];
    }
    return y;
}

void ResolventMatrix::solve_left(Vec& x) const {
    if (static_cast<int>(x.size()) != M + 1)
        throw std::invalid_argument("solve_left: vector must have size M+1");
    // Transpose system: sub[k] = N(k-1, k), diag[k] = N(k, k), super[k] = N(k+1, k).
    Vec diag(M), sub(M, 0.0), super(M, 0.0);
    for (int k = 0; k < M; ++k) diag[k] = at(k, k);
    for (int k = 1; k < M; ++k) sub[k] = at(k - 1, k);
    for (int k = 0; k + 1 < M; ++k) super[k] = at(k + 1, k);

    // Thomas sweep; the block is strictly diagonally dominant, no pivoting needed.
    Vec cp(M, 0.0);
    cp[0] = super[0] / diag[0];
    x[0] = x[0] / diag[0];
    for (int k = 1; k < M; ++k) {
        const double denom = diag[k] - sub[k] * cp[k - 1];
        if (denom == 0.0) throw std::runtime_error("solve_left: singular resolvent block");
        cp[k] = super[k] / denom;
        x[k] = (x[k] - sub[k] * x[k - 1]) / denom;
    }
    for (int k = M - 2; k >= 0; --k) x[k] -= cp[k] * x[k + 1];

    // Cemetery component: y_D = x_D - sum_j N(j, D) y_j.
    double kill = 0.0;
    for (int j = 1; j + 1 < M; ++j) kill += s * lambda[j] * ctx->ktilde[j] * x[j];
    x[M] += kill;
}

TransitionMatrixH build_transition(const ChainContext& ctx, const Vec& lambda_full, double h) {
    check_lambda(ctx, lambda_full);
    const int M = ctx.states();
    double max_rate = 0.0;
    for (int j = 1; j + 1 < M; ++j)
        max_rate = std::max(max_rate, lambda_full[j] * (1.0 + ctx.ktilde[j]));
    if (max_rate > 0.0 && !(h < 1.0 / max_rate)) {
        std::ostringstream os;
        os << "build_transition: step h = " << h << " too large; admissible bound is h < "
           << 1.0 / max_rate;
        throw std::invalid_argument(os.str());
    }
    if (!(h > 0.0)) throw std::invalid_argument("build_transition: step h must be > 0");
    return TransitionMatrixH{M, h, lambda_full, &ctx};
}

IntensityMatrix build_intensity(const ChainContext& ctx, const Vec& lambda_full) {
    check_lambda(ctx, lambda_full);
    return IntensityMatrix{ctx.states(), lambda_full, &ctx};
}

ResolventMatrix build_resolvent(const ChainContext& ctx, const Vec& lambda_full, double s) {
    check_lambda(ctx, lambda_full);
    if (!(s > 0.0)) throw std::invalid_argument("build_resolvent: time scale s must be > 0");
    return ResolventMatrix{ctx.states(), s, lambda_full, &ctx};
}

MixtureState resolvent_inverse_power(const ResolventMatrix& res, const MixtureState& start,
                                     int p) {
    if (p < 1) throw std::invalid_argument("resolvent_inverse_power: p must be >= 1");
    MixtureState out = start;
    for (int i = 0; i < p; ++i) res.solve_left(out.w);
    return out;
}

MixtureState expm_marginal(const IntensityMatrix& theta, const MixtureState& start, double t) {
    if (t < 0.0) throw std::invalid_argument("expm_marginal: t must be >= 0");
    const double base_rate = theta.max_exit_rate();
    if (t == 0.0 || base_rate == 0.0) return start;

    const double rate = 1.1 * base_rate;  // uniformization rate with 10% margin
    const int chunks = static_cast<int>(std::ceil(rate * t / 100.0));
    const double dt = t / chunks;
    const int M = theta.M;

    MixtureState cur = start;
    for (int c = 0; c < chunks; ++c) {
        const double mu = rate * dt;
        Vec acc(M + 1, 0.0);
        Vec v = cur.w;
        double weight = std::exp(-mu);
        double cum = weight;
        for (int j = 0; j <= M; ++j) acc[j] += weight * v[j];
        for (int k = 1; cum < 1.0 - 1e-14; ++k) {
            // v <- v * (I + Theta / rate), kept nonnegative by construction.
            Vec tv = theta.apply_left(v);
            for (int j = 0; j <= M; ++j) v[j] += tv[j] / rate;
            weight *= mu / k;
            cum += weight;
            for (int j = 0; j <= M; ++j) acc[j] += weight * v[j];
            if (k > 2000) break;  // unreachable for mu <= 100, kept as a hard stop
        }
        // Fold the truncated Poisson tail back in so the result stays a distribution.
        const double scale = 1.0 / cum;
        for (int j = 0; j <= M; ++j) cur.w[j] = acc[j] * scale;
    }
    return cur;
}

}  // namespace gapclock
