// SPDX-License-Identifier: Apache-2.0
#include "gapclock/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace gapclock {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct SimContext {
    const ChainContext* chain;
    Vec lambda;
    TimeLaw law;
    double h = 0.0;      // resolved step for discrete laws
    int M = 0;
};

int sample_index(const Vec& weights, double u) {
    double acc = 0.0;
    const int n = static_cast<int>(weights.size());
    for (int j = 0; j < n; ++j) {
        acc += weights[j];
        if (u <= acc) return j;
    }
    return n - 1;
}

/// One CTMC path up to the continuous stopping time T; returns the end state.
int run_ctmc(const SimContext& sc, int state, double T, PathRng& rng) {
    const int M = sc.M;
    double clock = 0.0;
    while (state != M && state != 0 && state != M - 1) {
        const double rate = sc.lambda[state] * (1.0 + sc.chain->ktilde[state]);
        if (rate <= 0.0) break;
        clock += -std::log(rng.next_unit()) / rate;
        if (clock > T) break;
        const double kt = sc.chain->ktilde[state];
        const double u = rng.next_unit() * (1.0 + kt);
        if (u <= sc.chain->q.up[state])
            state += 1;
        else if (u <= sc.chain->q.up[state] + sc.chain->q.down[state])
            state -= 1;
        else
            state = M;  // cemetery
    }
    return state;
}

/// One discrete-chain path for a given number of steps of the h-step matrix.
int run_discrete(const SimContext& sc, int state, long long steps, PathRng& rng) {
    const int M = sc.M;
    for (long long s = 0; s < steps; ++s) {
        if (state == M || state == 0 || state == M - 1) break;
        const double kt = sc.chain->ktilde[state];
        const double lam = sc.lambda[state];
        const double u = rng.next_unit();
        const double p_up = sc.h * lam * sc.chain->q.up[state];
        const double p_down = sc.h * lam * sc.chain->q.down[state];
        const double p_kill = sc.h * lam * kt;
        if (u <= p_up)
            state += 1;
        else if (u <= p_up + p_down)
            state -= 1;
        else if (u <= p_up + p_down + p_kill)
            state = M;
    }
    return state;
}

/// Geometric step count with success probability 1-a: P(k) = (1-a) a^k, k >= 0.
long long sample_geometric(double a, PathRng& rng) {
    const double u = rng.next_unit();
    if (a <= 0.0) return 0;
    return static_cast<long long>(std::floor(std::log(u) / std::log(a)));
}

int run_one_path(const SimContext& sc, const MixtureState& start, PathRng& rng) {
    int state = sample_index(start.w, rng.next_unit());
    const double t = sc.law.t;
    switch (sc.law.kind) {
        case LawKind::Deterministic:
            return run_ctmc(sc, state, t, rng);
        case LawKind::Exponential:
            return run_ctmc(sc, state, -t * std::log(rng.next_unit()), rng);
        case LawKind::Gamma: {
            double T = 0.0;
            for (int i = 0; i < sc.law.r; ++i) T += -std::log(rng.next_unit());
            return run_ctmc(sc, state, T * t / sc.law.r, rng);
        }
        case LawKind::Geometric: {
            const double a = t / (t + sc.h);
            return run_discrete(sc, state, sample_geometric(a, rng), rng);
        }
        case LawKind::NegBinomial: {
            const double a = t / (t + sc.h * sc.law.r);
            long long steps = 0;
            for (int i = 0; i < sc.law.r; ++i) steps += sample_geometric(a, rng);
            return run_discrete(sc, state, steps, rng);
        }
    }
    return state;
}

}  // namespace

PathRng::PathRng(std::uint64_t seed, std::uint64_t path) {
    state = seed ^ (0x517CC1B727220A95ULL + path * 0x2545F4914F6CDD1DULL);
    splitmix64(state);
    splitmix64(state);
}

std::uint64_t PathRng::next_u64() { return splitmix64(state); }

double PathRng::next_unit() {
    // 53-bit mantissa mapped to (0, 1].
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

MixtureState simulate(const Instance& inst, const Vec& lambda_full, const MixtureState& start,
                      const SimulateOptions& opts) {
    if (opts.n_paths < 1) throw std::invalid_argument("simulate: need at least one path");
    const ChainContext ctx = make_chain_context(inst);
    const int M = ctx.states();
    if (static_cast<int>(start.w.size()) != M + 1)
        throw std::invalid_argument("simulate: start mixture size mismatch");

    SimContext sc{&ctx, lambda_full, inst.law, 0.0, M};
    if (inst.law.kind == LawKind::Geometric || inst.law.kind == LawKind::NegBinomial) {
        double max_rate = 0.0;
        for (int j = 1; j + 1 < M; ++j)
            max_rate = std::max(max_rate, lambda_full[j] * (1.0 + ctx.ktilde[j]));
        sc.h = inst.law.h > 0.0 ? inst.law.h
                                : (max_rate > 0.0 ? 0.5 / max_rate : inst.law.t);
        if (max_rate > 0.0 && !(sc.h < 1.0 / max_rate))
            throw std::invalid_argument("simulate: law step h exceeds the admissible bound");
    }

    int threads = opts.threads > 0 ? opts.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (opts.n_paths < 10000) threads = 1;

    std::vector<std::vector<long long>> counts(threads, std::vector<long long>(M + 1, 0));
    auto work = [&](int tid) {
        auto& mine = counts[tid];
        for (long long path = tid; path < opts.n_paths; path += threads) {
            PathRng rng(opts.seed, static_cast<std::uint64_t>(path));
            mine[run_one_path(sc, start, rng)] += 1;
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int tid = 0; tid < threads; ++tid) pool.emplace_back(work, tid);
        for (auto& th : pool) th.join();
    }

    MixtureState out{Vec(M + 1, 0.0)};
    for (const auto& c : counts)
        for (int j = 0; j <= M; ++j) out.w[j] += static_cast<double>(c[j]);
    for (double& w : out.w) w /= static_cast<double>(opts.n_paths);
    return out;
}

double total_variation(const MixtureState& a, const MixtureState& b) {
    if (a.w.size() != b.w.size())
        throw std::invalid_argument("total_variation: size mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < a.w.size(); ++j) s += std::abs(a.w[j] - b.w[j]);
    return 0.5 * s;
}

}  // namespace gapclock
