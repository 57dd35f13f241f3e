// SPDX-License-Identifier: Apache-2.0
#include "gapclock/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "gapclock/simulate.hpp"

namespace gapclock {

namespace {

double linf_diff(const Vec& a, const Vec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

void clamp_interior(Vec& lam, const SolverOptions& opts) {
    for (std::size_t j = 1; j + 1 < lam.size(); ++j)
        lam[j] = std::clamp(lam[j], opts.lambda_floor, opts.lambda_cap);
}

/// In-place dense solve with partial pivoting; A is destroyed.
void dense_solve(std::vector<Vec>& A, Vec& b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        const double d = A[col][col];
        if (d == 0.0) throw std::runtime_error("dense_solve: singular system");
        for (int r = col + 1; r < n; ++r) {
            const double f = A[r][col] / d;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[r][c] * b[c];
        b[r] = s / A[r][r];
    }
}

double max_kill_rate(const ChainContext& chain, const Vec& lambda_full) {
    double m = 0.0;
    for (int j = 1; j + 1 < chain.states(); ++j)
        m = std::max(m, chain.ktilde[j] * lambda_full[j]);
    return m;
}

Vec phat_vector(const Vec& pmf, double alpha) {
    Vec v(pmf.size() + 1, 0.0);
    for (std::size_t j = 0; j < pmf.size(); ++j) v[j] = alpha * pmf[j];
    v.back() = 1.0 - alpha;
    return v;
}

Vec vhat_vector(int M, int split, double beta) {
    Vec v(M + 1, 0.0);
    v[split] = beta;
    v[split - 1] = 1.0 - beta;
    return v;
}

void require_valid(const Instance& inst, const char* who) {
    const ValidationReport rep = validate_instance(inst);
    if (!rep.ok())
        throw std::invalid_argument(std::string(who) + ": invalid instance: " + rep.joined());
}

double alpha_from(const Vec& pmf, const Vec& lambda_full, const Vec& kt, double s) {
    double acc = 0.0;
    for (std::size_t j = 0; j < pmf.size(); ++j) acc += pmf[j] * lambda_full[j] * kt[j];
    return 1.0 / (1.0 + s * acc);
}

/// Depth-limited Anderson mixing over the damped Picard step.
class AndersonMixer {
  public:
    AndersonMixer(int depth, double ridge) : depth_(depth), ridge_(ridge) {}

    Vec step(const Vec& x, const Vec& f, double omega) {
        Vec damped(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) damped[i] = x[i] + omega * f[i];
        if (!xs_.empty()) {
            const int m = static_cast<int>(xs_.size());
            std::vector<Vec> dF(m), dX(m);
            for (int c = 0; c < m; ++c) {
                const Vec& xp = c + 1 < m ? xs_[c + 1] : x;
                const Vec& fp = c + 1 < m ? fs_[c + 1] : f;
                dF[c] = sub(fp, fs_[c]);
                dX[c] = sub(xp, xs_[c]);
            }
            std::vector<Vec> G(m, Vec(m, 0.0));
            Vec rhs(m, 0.0);
            for (int a = 0; a < m; ++a) {
                for (int b = 0; b < m; ++b) G[a][b] = dot(dF[a], dF[b]);
                G[a][a] += ridge_;
                rhs[a] = dot(dF[a], f);
            }
            bool ok = true;
            try {
                dense_solve(G, rhs);
            } catch (const std::exception&) {
                ok = false;
            }
            if (ok) {
                Vec out = damped;
                for (int c = 0; c < m; ++c)
                    for (std::size_t i = 0; i < out.size(); ++i)
                        out[i] -= rhs[c] * (dX[c][i] + omega * dF[c][i]);
                bool finite = true;
                for (double v : out)
                    if (!std::isfinite(v)) finite = false;
                if (finite) damped = out;
            }
        }
        xs_.push_back(x);
        fs_.push_back(f);
        while (static_cast<int>(xs_.size()) > depth_) {
            xs_.pop_front();
            fs_.pop_front();
        }
        return damped;
    }

  private:
    static Vec sub(const Vec& a, const Vec& b) {
        Vec r(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
        return r;
    }
    static double dot(const Vec& a, const Vec& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    }
    int depth_;
    double ridge_;
    std::deque<Vec> xs_, fs_;
};

struct FixedPointResult {
    Vec lambda_full;
    GSolution gs;   ///< intensity solve at the converged reweighted target
    Vec q;          ///< converged (r-1)-step reweighting of p
    double fp_residual = 0.0;
    int iterations = 0;
    double eps_reached = 0.0;
    Vec trace;
};

/// Damped Picard sweep at one projection level. Adaptive halving on residual
/// increase, optional Anderson mixing. Returns true once the map residual
/// drops below tol.
bool picard_phase(const SolveContext& ctx, const Vec& pmf, double t, int r, double eps,
                  const SolverOptions& opts, int budget, double tol, Vec& lam, Vec& trace,
                  int& total) {
    const int M = ctx.states();
    double omega = opts.damping;
    double prev = std::numeric_limits<double>::infinity();
    AndersonMixer mixer(3, 1e-12);
    for (int it = 0; it < budget; ++it) {
        Vec next;
        try {
            next = apply_A_eps(ctx, lam, pmf, eps, r, t);
        } catch (const std::exception& e) {
            throw SolverFailure(std::string("fixed point: map evaluation failed (") + e.what() +
                                    ")",
                                trace);
        }
        clamp_interior(next, opts);
        const double res = linf_diff(next, lam);
        trace.push_back(res);
        ++total;
        // Keep lam where the residual was measured; stepping onto the map
        // value would inflate the reported residual for expansive maps.
        if (res < tol) return true;
        if (res > prev) omega = std::max(0.5 * omega, 1e-6);
        prev = res;
        if (opts.anderson) {
            Vec f(M, 0.0);
            for (int j = 1; j + 1 < M; ++j) f[j] = next[j] - lam[j];
            lam = mixer.step(lam, f, omega);
        } else {
            for (int j = 1; j + 1 < M; ++j) lam[j] = (1.0 - omega) * lam[j] + omega * next[j];
        }
        clamp_interior(lam, opts);
    }
    return false;
}

/// Safeguarded Newton on ln A(lambda) - ln lambda with a finite-difference
/// Jacobian and a backtracking line search. Handles the steeply non-monotone
/// maps where plain damped Picard oscillates.
bool newton_phase(const SolveContext& ctx, const Vec& pmf, double t, int r, double eps,
                  const SolverOptions& opts, int budget, double tol, Vec& lam, Vec& trace,
                  int& total) {
    const int M = ctx.states();
    const int n = M - 2;
    const double ulo = std::log(opts.lambda_floor), uhi = std::log(opts.lambda_cap);

    auto eval = [&](const Vec& lamF, Vec& gout) -> bool {
        Vec a;
        try {
            a = apply_A_eps(ctx, lamF, pmf, eps, r, t);
        } catch (const std::exception&) {
            return false;
        }
        gout.resize(n);
        for (int j = 0; j < n; ++j) {
            if (!(a[j + 1] > 0.0)) return false;
            gout[j] = std::log(a[j + 1]) - std::log(lamF[j + 1]);
        }
        return true;
    };
    auto gnorm_of = [](const Vec& g) {
        double m = 0.0;
        for (double v : g) m = std::max(m, std::abs(v));
        return m;
    };
    auto resid_of = [&](const Vec& lamF) {
        Vec a = apply_A_eps(ctx, lamF, pmf, eps, r, t);
        return linf_diff(a, lamF);
    };

    Vec g;
    if (!eval(lam, g)) return false;
    double gnorm = gnorm_of(g);

    for (int iter = 0; iter < budget; ++iter) {
        {
            const double res = resid_of(lam);
            trace.push_back(res);
            ++total;
            if (res < tol) return true;
        }
        // Central differences: the map curves hard enough near steep fixed
        // points that one-sided quotients stall the line search.
        std::vector<Vec> J(n, Vec(n, 0.0));
        const double du = 1e-6;
        bool jac_ok = true;
        for (int col = 0; col < n && jac_ok; ++col) {
            Vec lamP = lam, lamM = lam;
            lamP[col + 1] = std::exp(std::clamp(std::log(lamP[col + 1]) + du, ulo, uhi));
            lamM[col + 1] = std::exp(std::clamp(std::log(lamM[col + 1]) - du, ulo, uhi));
            Vec gp, gm;
            jac_ok = eval(lamP, gp) && eval(lamM, gm);
            if (!jac_ok) break;
            for (int row = 0; row < n; ++row) J[row][col] = (gp[row] - gm[row]) / (2.0 * du);
        }
        if (!jac_ok) return false;
        Vec d(g);
        for (double& v : d) v = -v;
        try {
            dense_solve(J, d);
        } catch (const std::exception&) {
            return false;
        }
        bool accepted = false;
        for (double fac = 1.0; fac >= 1.0 / 1024.0; fac *= 0.5) {
            Vec lamT = lam;
            for (int j = 0; j < n; ++j)
                lamT[j + 1] =
                    std::exp(std::clamp(std::log(lam[j + 1]) + fac * d[j], ulo, uhi));
            Vec gt;
            if (!eval(lamT, gt)) continue;
            if (gnorm_of(gt) < gnorm) {
                lam = lamT;
                g = gt;
                gnorm = gnorm_of(gt);
                accepted = true;
                break;
            }
        }
        if (!accepted) return resid_of(lam) < tol;
    }
    return resid_of(lam) < tol;
}

/// Runs the eps-continuation for the r-stage fixed point down to a 1e-16
/// guard level, which agrees with the unprojected map wherever the reweighted
/// target is positive while tolerating the target's sign noise: its tiny tail
/// entries are too intensity-sensitive for an unprojected evaluation away
/// from the exact solution. The contract residual of the unprojected map is
/// certified by the caller at the polished result.
FixedPointResult nb_fixed_point(const SolveContext& ctx, const Vec& pmf, double t, int r,
                                const SolverOptions& opts, const Vec* warm) {
    const double s = t / r;
    constexpr double kGuardEps = 1e-16;

    Vec lam;
    if (warm) {
        lam = *warm;
    } else {
        lam = solve_g(ctx.map, pmf, ctx.chain.ktilde, t).g;  // exponential start
    }
    clamp_interior(lam, opts);

    std::vector<double> levels;
    if (!warm)
        for (double e = opts.eps_start; e > opts.eps_floor * 0.99; e *= 0.1)
            levels.push_back(e);
    else
        levels.push_back(opts.eps_floor);
    levels.push_back(kGuardEps);

    FixedPointResult out;
    out.eps_reached = levels.front();
    int total = 0;

    for (double eps : levels) {
        const double level_tol =
            eps > kGuardEps ? std::max(1e-9, eps * 1e-4) : 0.1 * opts.tol_fixed_point;
        const int picard_budget = std::min(200, opts.max_iterations_per_level);
        const Vec level_entry = lam;
        const std::size_t trace_mark = out.trace.size();
        bool done = picard_phase(ctx, pmf, t, r, eps, opts, picard_budget, level_tol, lam,
                                 out.trace, total);
        if (!done)
            done = newton_phase(ctx, pmf, t, r, eps, opts, 60, level_tol, lam, out.trace, total);
        if (!done && opts.max_iterations_per_level > picard_budget)
            done = picard_phase(ctx, pmf, t, r, eps, opts,
                                opts.max_iterations_per_level - picard_budget, level_tol, lam,
                                out.trace, total);
        // A level that made things strictly worse poisons every level after
        // it (the clamped map can drive intensities toward the cap); restore
        // the entry iterate instead.
        if (!done && out.trace.size() > trace_mark &&
            out.trace.back() > out.trace[trace_mark]) {
            lam = level_entry;
        }
        out.eps_reached = eps;
    }

    Vec final_map;
    try {
        final_map = apply_A_eps(ctx, lam, pmf, kGuardEps, r, t);
    } catch (const std::exception& e) {
        throw SolverFailure(std::string("fixed point: final guarded pass failed (") + e.what() +
                                ")",
                            out.trace);
    }
    out.fp_residual = linf_diff(final_map, lam);
    if (out.fp_residual >= opts.tol_fixed_point) {
        std::ostringstream os;
        os << "fixed point: residual " << out.fp_residual << " above tolerance "
           << opts.tol_fixed_point;
        throw SolverFailure(os.str(), out.trace);
    }

    out.lambda_full = lam;
    out.iterations = total;
    out.q = h_iterate(ctx, pmf, lam, s, r);
    bool clean = true;
    for (double qj : out.q)
        if (!(qj > 0.0)) clean = false;
    if (!clean) out.q = project_eps(out.q, kGuardEps);
    for (double qj : out.q)
        if (!(qj > 0.0))
            throw SolverFailure("fixed point: converged reweighting not strictly positive",
                                out.trace);
    out.gs = solve_g(ctx.map, out.q, ctx.chain.ktilde, s);
    return out;
}

Solution assemble_solution(const Instance& inst, const SolveContext& ctx, const Vec& lambda_full,
                           double alpha, const GSolution& gs) {
    Solution sol;
    sol.lambda.assign(lambda_full.begin() + 1, lambda_full.end() - 1);
    sol.alpha = alpha;
    sol.beta = gs.beta;
    sol.split = gs.split;
    sol.x0_kappa = gs.x0;
    sol.x0 = kappa_inverse(ctx.map, inst.grid, gs.x0);
    sol.string_measure = string_measure(inst.grid, sol.lambda);
    return sol;
}

struct DetEval {
    MixtureState marginal;
    double alpha = 1.0;
    double residual = 0.0;
};

/// Marginal of the chain from the (split, beta) start, against alpha p.
template <class MarginalFn>
DetEval marginal_eval(const SolveContext& ctx, const Vec& pmf, const MarginalFn& marginal_of,
                      const Vec& lambda_full, int split, double beta) {
    const int M = ctx.states();
    MixtureState start{Vec(M + 1, 0.0)};
    start.w[split] = beta;
    start.w[split - 1] = 1.0 - beta;
    DetEval ev;
    ev.marginal = marginal_of(lambda_full, start);
    ev.alpha = 1.0 - ev.marginal.w[M];
    for (int j = 0; j < M; ++j)
        ev.residual = std::max(ev.residual, std::abs(ev.marginal.w[j] - ev.alpha * pmf[j]));
    return ev;
}

DetEval deterministic_eval(const SolveContext& ctx, const Vec& pmf, const Vec& lambda_full,
                           int split, double beta, double t) {
    return marginal_eval(ctx, pmf,
                         [&](const Vec& lamF, const MixtureState& start) {
                             return expm_marginal(build_intensity(ctx.chain, lamF), start, t);
                         },
                         lambda_full, split, beta);
}

struct PolishOutcome {
    Vec lambda_full;
    double beta;
    DetEval eval;
    int iterations = 0;
};

/// Newton on (log intensities, beta) with the split frozen; equations are the
/// first M-1 marginal mismatches (the last one is implied by the mass
/// identity). Finite-difference Jacobian, backtracking on the residual norm.
/// The log parametrization keeps the system well scaled across the many
/// orders of magnitude an intensity vector can legitimately span.
template <class MarginalFn>
PolishOutcome newton_polish(const SolveContext& ctx, const Vec& pmf,
                            const MarginalFn& marginal_of, int split, Vec lambda_full,
                            double beta, const SolverOptions& opts) {
    const int M = ctx.states();
    const int n = M - 1;
    const double ulo = std::log(opts.lambda_floor), uhi = std::log(opts.lambda_cap);

    auto residual_vec = [&](const Vec& lamF, double b, DetEval& ev) {
        ev = marginal_eval(ctx, pmf, marginal_of, lamF, split, b);
        Vec F(n);
        for (int j = 0; j < n; ++j) F[j] = ev.marginal.w[j] - ev.alpha * pmf[j];
        return F;
    };
    auto lambda_of = [&](const Vec& u) {
        Vec lamF(M, 0.0);
        for (int j = 0; j < M - 2; ++j) lamF[j + 1] = std::exp(std::clamp(u[j], ulo, uhi));
        return lamF;
    };

    Vec u(n, 0.0);
    for (int j = 0; j < M - 2; ++j)
        u[j] = std::log(std::clamp(lambda_full[j + 1], opts.lambda_floor, opts.lambda_cap));
    u[n - 1] = beta;

    PolishOutcome out{lambda_full, beta, {}, 0};
    Vec F = residual_vec(out.lambda_full, out.beta, out.eval);
    double normF = linf_diff(F, Vec(n, 0.0));

    for (int iter = 0; iter < 60 && normF > 1e-12; ++iter) {
        ++out.iterations;
        std::vector<Vec> J(n, Vec(n, 0.0));
        for (int col = 0; col < n; ++col) {
            Vec uP = u;
            const double step = col < M - 2 ? 1e-6 : 1e-8;
            uP[col] += step;
            DetEval evP;
            const Vec FP = residual_vec(lambda_of(uP), uP[n - 1], evP);
            for (int row = 0; row < n; ++row) J[row][col] = (FP[row] - F[row]) / step;
        }
        Vec d(F);
        for (double& v : d) v = -v;
        try {
            dense_solve(J, d);
        } catch (const std::exception&) {
            break;
        }
        // Cap the log step so one bad Jacobian cannot fling the iterate.
        double dmax = 0.0;
        for (int j = 0; j < M - 2; ++j) dmax = std::max(dmax, std::abs(d[j]));
        if (dmax > 10.0)
            for (double& v : d) v *= 10.0 / dmax;

        bool accepted = false;
        for (double fac = 1.0; fac >= 1.0 / 1024.0; fac *= 0.5) {
            Vec uT = u;
            for (int j = 0; j < n; ++j) uT[j] += fac * d[j];
            DetEval evT;
            const Vec lamT = lambda_of(uT);
            const Vec FT = residual_vec(lamT, uT[n - 1], evT);
            const double normT = linf_diff(FT, Vec(n, 0.0));
            if (normT < normF) {
                u = uT;
                out.lambda_full = lamT;
                out.beta = uT[n - 1];
                out.eval = evT;
                F = FT;
                normF = normT;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    return out;
}

}  // namespace

SolveContext make_solve_context(const Instance& inst, double anchor_quantile) {
    SolveContext ctx;
    ctx.map = build_kappa(inst.grid, inst.drift, inst.probs, anchor_quantile);
    ctx.chain = make_chain_context(inst);
    return ctx;
}

Vec h_iterate(const SolveContext& ctx, const Vec& pmf, const Vec& lambda_full, double s, int r) {
    const int M = ctx.states();
    if (r < 1) throw std::invalid_argument("h_iterate: r must be >= 1");
    if (!(s > 0.0)) throw std::invalid_argument("h_iterate: s must be > 0");
    // Extended-precision accumulation: the repeated signed applications cancel
    // heavily and the tiny tail entries of the result would otherwise carry
    // sign noise at the double roundoff scale.
    std::vector<long double> h(pmf.begin(), pmf.end());
    const Vec& kt = ctx.chain.ktilde;
    for (int it = 0; it < r - 1; ++it) {
        std::vector<long double> y = h;
        long double z = 0.0L;
        for (int j = 1; j + 1 < M; ++j) {
            const long double flow =
                static_cast<long double>(s) * h[j] * lambda_full[j];
            y[j] += flow * (1.0L + kt[j]);
            y[j + 1] -= flow * ctx.chain.q.up[j];
            y[j - 1] -= flow * ctx.chain.q.down[j];
        }
        for (int j = 0; j < M; ++j)
            z += h[j] * (1.0L + static_cast<long double>(s) * lambda_full[j] * kt[j]);
        for (int j = 0; j < M; ++j) h[j] = y[j] / z;
    }
    return Vec(h.begin(), h.end());
}

Vec project_eps(const Vec& v, double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("project_eps: eps must lie in (0, 1)");
    double denom = 0.0;
    for (double x : v) denom += std::max(x, eps);
    Vec w(v.size());
    double C = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        w[j] = std::max(v[j] / denom, eps);
        C += w[j];
    }
    for (double& x : w) x /= C;
    return w;
}

double projection_normalizer(const Vec& v, double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("projection_normalizer: eps must lie in (0, 1)");
    double denom = 0.0;
    for (double x : v) denom += std::max(x, eps);
    double C = 0.0;
    for (double x : v) C += std::max(x / denom, eps);
    return C;
}

Vec apply_A_eps(const SolveContext& ctx, const Vec& lambda_full, const Vec& pmf, double eps,
                int r, double t) {
    const double s = t / r;
    Vec h = h_iterate(ctx, pmf, lambda_full, s, r);
    if (eps > 0.0) {
        h = project_eps(h, eps);
    } else {
        for (double x : h)
            if (!(x > 0.0))
                throw std::runtime_error(
                    "apply_A_eps: reweighted target not positive at eps = 0");
    }
    return solve_g(ctx.map, h, ctx.chain.ktilde, s).g;
}

Solution solve_exponential(const Instance& inst, const SolverOptions& opts) {
    require_valid(inst, "solve_exponential");
    const SolveContext ctx = make_solve_context(inst, opts.anchor_quantile);
    const double t = inst.law.t;
    const GSolution gs = solve_g(ctx.map, inst.probs, ctx.chain.ktilde, t);
    const double alpha = alpha_from(inst.probs, gs.g, ctx.chain.ktilde, t);

    const ResolventMatrix res = build_resolvent(ctx.chain, gs.g, t);
    const Vec lhs = res.apply_left(phat_vector(inst.probs, alpha));
    const double residual =
        linf_diff(lhs, vhat_vector(inst.size(), gs.split, gs.beta));
    if (residual > opts.tol_exponential) {
        std::ostringstream os;
        os << "solve_exponential: closed-form residual " << residual
           << " exceeds tolerance; the unique-solution identity failed numerically";
        throw std::runtime_error(os.str());
    }

    Solution sol = assemble_solution(inst, ctx, gs.g, alpha, gs);
    sol.diag.residual = residual;
    sol.diag.fixed_point_residual = gs.residual;
    sol.diag.iterations = 1;
    sol.diag.r_used = 1;
    sol.diag.converged = true;

    MixtureState marg = resolvent_inverse_power(res, start_mixture(inst.size(), gs.split, gs.beta), 1);
    sol.diag.oracle_residual = linf_diff(marg.w, phat_vector(inst.probs, alpha));
    return sol;
}

struct NbCore {
    Vec lambda_full;
    int split = 1;
    double beta = 1.0;
    DetEval eval;  ///< marginal from the resolvent-power oracle at the result
    int iterations = 0;
    double eps_reached = 0.0;
    Vec trace;
};

/// r-stage solve: eps-continuation of the calibration map for a warm start
/// and the split structure, then a Newton polish directly on the oracle
/// equations (the resolvent-power marginal), which are evaluable without
/// cancellation at any intensity.
NbCore nb_solve_core(const SolveContext& ctx, const Vec& pmf, double t, int r,
                     const SolverOptions& opts, const Vec* warm) {
    const int M = ctx.states();
    const double s = t / r;
    const auto nb_marginal = [&](const Vec& lamF, const MixtureState& start) {
        return resolvent_inverse_power(build_resolvent(ctx.chain, lamF, s), start, r);
    };

    NbCore core;
    try {
        FixedPointResult fp = nb_fixed_point(ctx, pmf, t, r, opts, warm);
        core.lambda_full = std::move(fp.lambda_full);
        core.split = fp.gs.split;
        core.beta = fp.gs.beta;
        core.iterations = fp.iterations;
        core.eps_reached = fp.eps_reached;
        core.trace = std::move(fp.trace);
    } catch (const SolverFailure& e) {
        // Fall back to the exponential-time structure as a polish start.
        core.trace = e.residual_trace;
        const GSolution g0 = solve_g(ctx.map, pmf, ctx.chain.ktilde, t);
        core.lambda_full = warm ? *warm : g0.g;
        core.split = g0.split;
        core.beta = g0.beta;
        core.eps_reached = opts.eps_start;
    }

    core.eval = marginal_eval(ctx, pmf, nb_marginal, core.lambda_full, core.split, core.beta);
    const Vec& kap = ctx.map.kappa;
    for (int round = 0; round < 3 && core.eval.residual > 1e-12; ++round) {
        PolishOutcome pol = newton_polish(ctx, pmf, nb_marginal, core.split, core.lambda_full,
                                          core.beta, opts);
        core.iterations += pol.iterations;
        int split = core.split;
        if (pol.beta <= 0.0 || pol.beta > 1.0 + 1e-9) {
            // The start point left its kappa gap: re-bracket and repolish.
            double x0 = kap[split - 1] + pol.beta * (kap[split] - kap[split - 1]);
            x0 = std::clamp(x0, kap.front() + 1e-300, kap.back());
            for (int u = 1; u < M; ++u)
                if (kap[u - 1] < x0 && x0 <= kap[u]) { split = u; break; }
            const double beta = (x0 - kap[split - 1]) / (kap[split] - kap[split - 1]);
            pol = newton_polish(ctx, pmf, nb_marginal, split, pol.lambda_full, beta, opts);
            core.iterations += pol.iterations;
        }
        bool improved = false;
        if (pol.eval.residual < core.eval.residual) {
            core.lambda_full = pol.lambda_full;
            core.beta = std::min(pol.beta, 1.0);
            core.split = split;
            core.eval = pol.eval;
            improved = true;
        }
        if (core.eval.residual <= 1e-12) break;
        // Stalled: re-derive the split structure from the scan at the current
        // intensities and try again if it disagrees.
        try {
            const Vec h = h_iterate(ctx, pmf, core.lambda_full, s, r);
            const GSolution gs = solve_g(ctx.map, project_eps(h, 1e-16), ctx.chain.ktilde, s);
            if (gs.split != core.split || std::abs(gs.beta - core.beta) > 1e-6) {
                core.split = gs.split;
                core.beta = gs.beta;
                core.eval =
                    marginal_eval(ctx, pmf, nb_marginal, core.lambda_full, core.split, core.beta);
                continue;
            }
        } catch (const std::exception&) {
            // keep the current structure
        }
        if (!improved) break;
    }

    // The marginal equations leave slack along their flat directions; pin the
    // remaining components on the map equations themselves when the
    // unprojected map is evaluable here.
    {
        Vec lam = core.lambda_full;
        Vec trace;
        int its = 0;
        bool sharpened = false;
        try {
            sharpened = newton_phase(ctx, pmf, t, r, 0.0, opts, 30,
                                     0.5 * opts.tol_fixed_point, lam, trace, its);
        } catch (const std::exception&) {
            sharpened = false;
        }
        core.iterations += its;
        if (sharpened) {
            DetEval ev = marginal_eval(ctx, pmf, nb_marginal, lam, core.split, core.beta);
            int split = core.split;
            double beta = core.beta;
            try {
                const Vec h = h_iterate(ctx, pmf, lam, s, r);
                const GSolution gs =
                    solve_g(ctx.map, project_eps(h, 1e-16), ctx.chain.ktilde, s);
                const DetEval ev2 = marginal_eval(ctx, pmf, nb_marginal, lam, gs.split, gs.beta);
                if (ev2.residual < ev.residual) {
                    ev = ev2;
                    split = gs.split;
                    beta = gs.beta;
                }
            } catch (const std::exception&) {
            }
            if (ev.residual <= std::max(core.eval.residual, 1e-10)) {
                core.lambda_full = std::move(lam);
                core.split = split;
                core.beta = std::min(beta, 1.0);
                core.eval = ev;
            }
        }
    }
    return core;
}

Solution solve_negbinomial(const Instance& inst, int r, const SolverOptions& opts) {
    require_valid(inst, "solve_negbinomial");
    if (r < 1) throw std::invalid_argument("solve_negbinomial: r must be >= 1");
    const SolveContext ctx = make_solve_context(inst, opts.anchor_quantile);
    const double t = inst.law.t;

    // Stage ladder: warm every stage from the previous power of two. Each
    // rung is cheap and keeps the fixed-point iterate inside its basin.
    NbCore core;
    Vec warm;
    bool have_warm = false;
    for (int rr = 1;; rr *= 2) {
        const int stage = std::min(rr, r);
        core = nb_solve_core(ctx, inst.probs, t, stage, opts, have_warm ? &warm : nullptr);
        warm = core.lambda_full;
        have_warm = true;
        if (stage == r) break;
    }

    // Contract residual ||lambda - A(lambda)||. Once the marginal equations
    // hold, the (r-1)-step reweighting of p equals the alive part of the
    // one-stage backward law from the start mixture; the banded solve
    // computes that without cancellation, so the map can be certified at the
    // conditioning floor the forward recursion cannot reach.
    double fp_residual;
    bool stable_route = core.eval.residual < 1e-10;
    if (stable_route) {
        const ResolventMatrix res = build_resolvent(ctx.chain, core.lambda_full, t / r);
        MixtureState back = start_mixture(inst.size(), core.split, core.beta);
        res.solve_left(back.w);
        Vec q_cert(inst.size());
        double z = 0.0;
        for (int j = 0; j < inst.size(); ++j) z += (q_cert[j] = back.w[j]);
        for (double& v : q_cert) v /= z;
        for (double v : q_cert)
            if (!(v > 0.0)) stable_route = false;
        if (stable_route) {
            const GSolution gcert = solve_g(ctx.map, q_cert, ctx.chain.ktilde, t / r);
            fp_residual = linf_diff(gcert.g, core.lambda_full);
        }
    }
    if (!stable_route) {
        Vec mapped;
        try {
            mapped = apply_A_eps(ctx, core.lambda_full, inst.probs, 0.0, r, t);
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "solve_negbinomial: unprojected map not evaluable at the result (" << e.what()
               << "; oracle residual " << core.eval.residual << ")";
            throw SolverFailure(os.str(), core.trace);
        }
        fp_residual = linf_diff(mapped, core.lambda_full);
    }
    if (fp_residual >= opts.tol_fixed_point) {
        std::ostringstream os;
        os << "solve_negbinomial: fixed-point residual " << fp_residual
           << " above tolerance " << opts.tol_fixed_point;
        throw SolverFailure(os.str(), core.trace);
    }

    const double alpha = core.eval.alpha;
    const double lower = std::pow(1.0 + (t / r) * max_kill_rate(ctx.chain, core.lambda_full), -r);
    if (alpha < lower * (1.0 - 1e-12))
        throw std::runtime_error("solve_negbinomial: alpha below its lower bound (internal error)");

    Solution sol;
    sol.lambda.assign(core.lambda_full.begin() + 1, core.lambda_full.end() - 1);
    sol.alpha = alpha;
    sol.beta = core.beta;
    sol.split = core.split;
    const Vec& kap = ctx.map.kappa;
    sol.x0_kappa = kap[core.split - 1] + core.beta * (kap[core.split] - kap[core.split - 1]);
    sol.x0 = kappa_inverse(ctx.map, inst.grid, sol.x0_kappa);
    sol.string_measure = string_measure(inst.grid, sol.lambda);
    sol.diag.residual = fp_residual;
    sol.diag.fixed_point_residual = fp_residual;
    sol.diag.oracle_residual = core.eval.residual;
    sol.diag.iterations = core.iterations;
    sol.diag.r_used = r;
    sol.diag.eps_reached = core.eps_reached;
    sol.diag.converged = true;
    return sol;
}

Solution solve_deterministic(const Instance& inst, const SolverOptions& opts) {
    require_valid(inst, "solve_deterministic");
    const SolveContext ctx = make_solve_context(inst, opts.anchor_quantile);
    const double t = inst.law.t;
    const int M = inst.size();

    Vec warm;
    bool have_warm = false;
    double best_res = std::numeric_limits<double>::infinity();
    Vec best_lam;
    int best_split = 1;
    double best_beta = 1.0;
    int best_r = 1;
    int iterations = 0;
    double eps_reached = opts.eps_start;
    std::string last_failure;

    for (int r = 1; r <= opts.r_max; r *= 2) {
        NbCore core;
        try {
            core = nb_solve_core(ctx, inst.probs, t, r, opts, have_warm ? &warm : nullptr);
        } catch (const std::exception& e) {
            last_failure = e.what();
            continue;
        }
        warm = core.lambda_full;
        have_warm = true;
        iterations += core.iterations;
        eps_reached = core.eps_reached;
        const DetEval ev =
            deterministic_eval(ctx, inst.probs, core.lambda_full, core.split, core.beta, t);
        if (ev.residual < best_res) {
            best_res = ev.residual;
            best_lam = core.lambda_full;
            best_split = core.split;
            best_beta = core.beta;
            best_r = r;
        }
        if (ev.residual < opts.tol_deterministic) break;
    }
    if (!have_warm)
        throw SolverFailure("solve_deterministic: every continuation stage failed: " +
                                last_failure,
                            Vec{});

    // Newton polish with the split frozen; if the polished start point leaves
    // its kappa gap, re-bracket the split once and polish again.
    const auto det_marginal = [&](const Vec& lamF, const MixtureState& start) {
        return expm_marginal(build_intensity(ctx.chain, lamF), start, t);
    };
    PolishOutcome pol =
        newton_polish(ctx, inst.probs, det_marginal, best_split, best_lam, best_beta, opts);
    iterations += pol.iterations;
    if (pol.beta <= 0.0 || pol.beta > 1.0 + 1e-9) {
        const Vec& kap = ctx.map.kappa;
        double x0 = kap[best_split - 1] + pol.beta * (kap[best_split] - kap[best_split - 1]);
        x0 = std::clamp(x0, kap.front() + 1e-300, kap.back());
        int split = best_split;
        for (int u = 1; u < M; ++u)
            if (kap[u - 1] < x0 && x0 <= kap[u]) { split = u; break; }
        double beta = (x0 - kap[split - 1]) / (kap[split] - kap[split - 1]);
        pol = newton_polish(ctx, inst.probs, det_marginal, split, pol.lambda_full, beta, opts);
        iterations += pol.iterations;
        best_split = split;
    }
    if (pol.beta > 1.0 && pol.beta <= 1.0 + 1e-9) pol.beta = 1.0;  // snap roundoff overshoot

    const DetEval ev = deterministic_eval(ctx, inst.probs, pol.lambda_full, best_split,
                                          pol.beta, t);
    const bool pol_usable = pol.beta > 0.0 && pol.beta <= 1.0;
    const bool use_polished = pol_usable && ev.residual <= best_res;
    const Vec& lamF = use_polished ? pol.lambda_full : best_lam;
    const double betaF = use_polished ? pol.beta : best_beta;
    const DetEval evF = use_polished
                            ? ev
                            : deterministic_eval(ctx, inst.probs, best_lam, best_split,
                                                 best_beta, t);

    Solution sol;
    sol.lambda.assign(lamF.begin() + 1, lamF.end() - 1);
    sol.alpha = evF.alpha;
    sol.beta = betaF;
    sol.split = best_split;
    const Vec& kap = ctx.map.kappa;
    sol.x0_kappa = kap[best_split - 1] + betaF * (kap[best_split] - kap[best_split - 1]);
    sol.x0 = kappa_inverse(ctx.map, inst.grid, sol.x0_kappa);
    sol.string_measure = string_measure(inst.grid, sol.lambda);
    sol.diag.residual = evF.residual;
    sol.diag.oracle_residual = evF.residual;
    sol.diag.iterations = iterations;
    sol.diag.r_used = best_r;
    sol.diag.eps_reached = eps_reached;
    sol.diag.converged = evF.residual < opts.tol_deterministic;

    const double lower = std::exp(-t * max_kill_rate(ctx.chain, lamF));
    if (sol.alpha < lower - std::max(1e-10, 10.0 * evF.residual)) sol.diag.converged = false;
    return sol;
}

Solution solve(const Instance& inst, const SolverOptions& opts) {
    switch (inst.law.kind) {
        case LawKind::Exponential:
        case LawKind::Geometric:
            return solve_exponential(inst, opts);
        case LawKind::NegBinomial:
        case LawKind::Gamma:
            return solve_negbinomial(inst, inst.law.r, opts);
        case LawKind::Deterministic:
            return solve_deterministic(inst, opts);
    }
    throw std::invalid_argument("solve: unknown law kind");
}

VerifyReport verify_solution(const Instance& inst, const Solution& sol,
                             const VerifyOptions& opts) {
    const int M = inst.size();
    if (static_cast<int>(sol.lambda.size()) != M - 2)
        throw std::invalid_argument("verify_solution: lambda size mismatch");
    if (sol.split < 1 || sol.split >= M)
        throw std::invalid_argument("verify_solution: split index out of range");

    const ChainContext chain = make_chain_context(inst);
    const Vec lamF = full_lambda(M, sol.lambda);
    const MixtureState start = start_mixture(M, sol.split, sol.beta);
    const double t = inst.law.t;

    VerifyReport rep;
    rep.target = MixtureState{phat_vector(inst.probs, sol.alpha)};
    switch (inst.law.kind) {
        case LawKind::Exponential:
        case LawKind::Geometric: {
            const ResolventMatrix res = build_resolvent(chain, lamF, t);
            rep.oracle = resolvent_inverse_power(res, start, 1);
            break;
        }
        case LawKind::NegBinomial:
        case LawKind::Gamma: {
            const int r = inst.law.r;
            const ResolventMatrix res = build_resolvent(chain, lamF, t / r);
            rep.oracle = resolvent_inverse_power(res, start, r);
            break;
        }
        case LawKind::Deterministic: {
            const IntensityMatrix theta = build_intensity(chain, lamF);
            rep.oracle = expm_marginal(theta, start, t);
            break;
        }
    }
    rep.max_abs_deviation = linf_diff(rep.oracle.w, rep.target.w);
    if (opts.mc_check) {
        SimulateOptions so;
        so.n_paths = opts.mc_paths;
        so.seed = opts.seed;
        const MixtureState emp = simulate(inst, lamF, start, so);
        rep.mc_tv = total_variation(emp, rep.target);
    }
    return rep;
}

}  // namespace gapclock
