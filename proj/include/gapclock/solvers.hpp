// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

#include "gapclock/chain.hpp"
#include "gapclock/coords.hpp"
#include "gapclock/gfun.hpp"
#include "gapclock/string_measure.hpp"

namespace gapclock {

struct SolverOptions {
    double tol_exponential = 1e-10;  ///< residual gate for the closed-form solve
    double tol_fixed_point = 1e-8;   ///< fixed-point residual at eps = 0
    double tol_deterministic = 1e-6; ///< marginal residual for deterministic time
    double eps_start = 1e-2;
    double eps_floor = 1e-10;
    double damping = 0.5;
    int max_iterations_per_level = 10000;
    bool anderson = false;           ///< Anderson acceleration, depth 3
    int r_max = 64;                  ///< continuation cap for deterministic time
    double anchor_quantile = 0.25;
    double lambda_floor = 1e-12;
    double lambda_cap = 1e12;
};

struct SolveDiagnostics {
    double residual = 0.0;             ///< law-appropriate solve residual
    double fixed_point_residual = 0.0; ///< ||A(lambda) - lambda||_inf at return
    double oracle_residual = 0.0;      ///< marginal deviation of the verifying oracle
    int iterations = 0;
    int r_used = 1;
    double eps_reached = 0.0;
    bool converged = true;
};

/// Calibrated clock together with the start split and survival weight.
struct Solution {
    Vec lambda;          ///< interior intensities, size M-2, strictly positive
    double alpha = 1.0;  ///< survival probability at the stopping time
    double beta = 1.0;   ///< weight of the upper start state
    int split = 1;       ///< 0-based upper start state (reported 1-based as l = split+1)
    double x0_kappa = 0.0;
    double x0 = 0.0;     ///< initial point in original coordinates
    StringMeasureTable string_measure;
    SolveDiagnostics diag;
};

/// Non-convergence with the residual history attached to the message.
class SolverFailure : public std::runtime_error {
  public:
    SolverFailure(const std::string& what, Vec trace)
        : std::runtime_error(what), residual_trace(std::move(trace)) {}
    Vec residual_trace;
};

/// Per-instance data shared by every solver stage.
struct SolveContext {
    CoordinateMap map;
    ChainContext chain;
    int states() const { return chain.states(); }
};

SolveContext make_solve_context(const Instance& inst, double anchor_quantile = 0.25);

/// (r-1)-fold normalized application of the restricted resolvent:
/// h^{(0)} = p, h^{(k)} = h^{(k-1)} N_s / sum_j h_j^{(k-1)} (1 + s lambda_j kt_j).
/// The result always sums to 1; entries may be negative away from a fixed point.
Vec h_iterate(const SolveContext& ctx, const Vec& pmf, const Vec& lambda_full, double s, int r);

/// Clamped projection onto the simplex interior; output sums to 1 with every
/// entry at least eps / M.
Vec project_eps(const Vec& v, double eps);

/// Normalizer of the clamped projection; lies in [1, M] whenever the positive
/// part of v has total mass at least 1.
double projection_normalizer(const Vec& v, double eps);

/// One application of the calibration map: the intensity solve on the
/// (projected) (r-1)-step reweighting of p. eps = 0 skips the projection.
/// Returns a full-size lambda with zero endpoints.
Vec apply_A_eps(const SolveContext& ctx, const Vec& lambda_full, const Vec& pmf, double eps,
                int r, double t);

/// Closed-form calibration for exponential or geometric stopping.
Solution solve_exponential(const Instance& inst, const SolverOptions& opts = {});

/// Damped fixed-point calibration for negative-binomial / Gamma stopping with
/// r stages, with eps-continuation down to an unprojected final pass.
Solution solve_negbinomial(const Instance& inst, int r, const SolverOptions& opts = {});

/// Deterministic-time calibration: stage continuation r = 1, 2, 4, ... with
/// warm starts, then a Newton polish on (lambda, beta) with the split frozen.
Solution solve_deterministic(const Instance& inst, const SolverOptions& opts = {});

/// Dispatches on the instance's law.
Solution solve(const Instance& inst, const SolverOptions& opts = {});

struct VerifyOptions {
    bool mc_check = false;
    long long mc_paths = 200000;
    std::uint64_t seed = 1;
};

struct VerifyReport {
    double max_abs_deviation = 0.0;
    MixtureState oracle;   ///< marginal recomputed by the law-appropriate oracle
    MixtureState target;   ///< (alpha p, 1 - alpha)
    double mc_tv = -1.0;   ///< total variation of the Monte Carlo cross-check, -1 if off
};

/// Recomputes the marginal with the law-appropriate oracle and reports the
/// deviation from (alpha p, 1 - alpha).
VerifyReport verify_solution(const Instance& inst, const Solution& sol,
                             const VerifyOptions& opts = {});

}  // namespace gapclock
