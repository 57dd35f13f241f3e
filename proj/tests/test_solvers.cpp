// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "gapclock/solvers.hpp"
#include "support.hpp"

using namespace gapclock;

namespace {

Instance three_state(double k2, LawKind kind = LawKind::Exponential, double t = 1.0) {
    Instance inst;
    inst.grid.states = {0.0, 1.0, 2.0};
    inst.probs = {0.25, 0.5, 0.25};
    inst.drift = {0.0};
    inst.killing = {k2};
    inst.law = TimeLaw{kind, t, 1, 0.0};
    return inst;
}

/// Drift-free companion problem on the kappa grid: same branch probabilities,
/// same dimensionless killing, hence the same chain up to state relabeling.
Instance kappa_companion(const Instance& inst, const CoordinateMap& map) {
    Instance flat;
    flat.grid.states = map.kappa;
    flat.probs = inst.probs;
    flat.drift.assign(inst.size() - 2, 0.0);
    flat.killing.resize(inst.size() - 2);
    const Vec kt = ktilde(inst.grid, inst.killing);
    for (int j = 1; j + 1 < inst.size(); ++j)
        flat.killing[j - 1] = kt[j] / (map.eps(j) * map.eps(j + 1));
    flat.law = inst.law;
    return flat;
}

double kill_star(const Instance& inst, const Vec& lambda_interior) {
    const Vec kt = ktilde(inst.grid, inst.killing);
    double m = 0.0;
    for (int j = 1; j + 1 < inst.size(); ++j)
        m = std::max(m, kt[j] * lambda_interior[j - 1]);
    return m;
}

}  // namespace

TEST_CASE("exponential closed form: no killing") {
    const Solution sol = solve_exponential(three_state(0.0));
    CHECK(sol.lambda[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sol.alpha == doctest::Approx(1.0));
    CHECK(sol.beta == doctest::Approx(1.0));
    CHECK(sol.x0_kappa == doctest::Approx(0.0));
    CHECK(sol.x0 == doctest::Approx(1.0));  // original coordinates: the middle state
    CHECK(sol.split == 1);
    CHECK(sol.diag.residual <= 1e-12);
}

TEST_CASE("exponential closed form: unit killing gives alpha = 2/3") {
    const Solution sol = solve_exponential(three_state(1.0));
    CHECK(sol.lambda[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sol.alpha == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(sol.beta == doctest::Approx(1.0));
    CHECK(sol.x0_kappa == doctest::Approx(0.0));
    CHECK(sol.diag.oracle_residual <= 1e-14);
    CHECK(sol.string_measure.m[1] == doctest::Approx(2.0));
}

TEST_CASE("exponential residual identity holds on random instances") {
    for (std::uint64_t seed = 1; seed <= 80; ++seed) {
        const Instance inst = testsup::random_instance(seed);
        const Solution sol = solve_exponential(inst);  // throws when > 1e-10
        CHECK(sol.diag.residual < 1e-10);
        for (double l : sol.lambda) CHECK(l > 0.0);
        CHECK(sol.alpha > 0.0);
        CHECK(sol.alpha <= 1.0);
    }
}

TEST_CASE("no killing, no drift: alpha is one and x0 the kappa mean") {
    for (std::uint64_t seed = 200; seed <= 215; ++seed) {
        Instance inst = testsup::random_instance(seed);
        std::fill(inst.drift.begin(), inst.drift.end(), 0.0);
        std::fill(inst.killing.begin(), inst.killing.end(), 0.0);
        const Solution sol = solve_exponential(inst);
        CHECK(sol.alpha == doctest::Approx(1.0).epsilon(1e-14));
        const CoordinateMap map = build_kappa(inst.grid, inst.drift, inst.probs);
        double mean = 0.0;
        for (int j = 0; j < inst.size(); ++j) mean += map.kappa[j] * inst.probs[j];
        CHECK(sol.x0_kappa == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("h iterate: identity cases and the hand-evaluated killed step") {
    const Instance inst = three_state(1.0);
    const SolveContext ctx = make_solve_context(inst);
    const Vec p = inst.probs;

    CHECK(testsup::linf(h_iterate(ctx, p, {0.0, 0.0, 0.0}, 0.5, 4), p) == 0.0);
    CHECK(testsup::linf(h_iterate(ctx, p, {0.0, 1.0, 0.0}, 1.0, 1), p) == 0.0);

    const Vec h2 = h_iterate(ctx, p, {0.0, 1.0, 0.0}, 0.5, 2);
    CHECK(h2[0] == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(h2[1] == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(h2[2] == doctest::Approx(0.1).epsilon(1e-14));

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Instance rnd = testsup::random_instance(seed);
        const SolveContext c2 = make_solve_context(rnd);
        testsup::Rng rng(seed);
        Vec lam(rnd.size(), 0.0);
        for (int j = 1; j + 1 < rnd.size(); ++j) lam[j] = rng.range(0.0, 4.0);
        for (int r : {1, 2, 5}) {
            const Vec h = h_iterate(c2, rnd.probs, lam, rnd.law.t / r, r);
            double sum = 0.0;
            for (double v : h) sum += v;
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("projection: clean pmf passes through, negatives are clamped") {
    const Vec p{0.25, 0.5, 0.25};
    CHECK(testsup::linf(project_eps(p, 0.2), p) <= 1e-15);

    const Vec clamped = project_eps({1.0, -1.0}, 0.5);
    CHECK(clamped[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-15));
    CHECK(clamped[1] == doctest::Approx(3.0 / 7.0).epsilon(1e-15));

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        testsup::Rng rng(seed);
        const int n = rng.uniform_int(2, 8);
        Vec v(n);
        for (double& x : v) x = rng.range(-1.0, 2.0);
        const double eps = rng.range(0.01, 0.5);
        const Vec w = project_eps(v, eps);
        double sum = 0.0, minw = 1.0;
        for (double x : w) {
            sum += x;
            minw = std::min(minw, x);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-14);
        CHECK(minw >= eps / n - 1e-15);
    }
}

TEST_CASE("projection normalizer stays between 1 and M for unit-plus mass") {
    for (std::uint64_t seed = 40; seed <= 70; ++seed) {
        testsup::Rng rng(seed);
        const int n = rng.uniform_int(2, 9);
        Vec v(n);
        double pos = 0.0;
        for (double& x : v) {
            x = rng.range(-0.5, 1.5);
            pos += std::max(x, 0.0);
        }
        if (pos < 1.0) {
            v[0] += 1.0 - pos;  // enforce the hypothesis of the bound
        }
        const double eps = rng.range(1e-6, 0.9);
        const double C = projection_normalizer(v, eps);
        CHECK(C >= 1.0 - 1e-12);
        CHECK(C <= n + 1e-12);
    }
}

TEST_CASE("calibration map: stage one is intensity-independent and exact") {
    const Instance inst = three_state(0.0);
    const SolveContext ctx = make_solve_context(inst);
    for (double eps : {0.0, 0.01, 0.2}) {
        const Vec out = apply_A_eps(ctx, {0.0, 7.0, 0.0}, inst.probs, eps, 1, 1.0);
        CHECK(out[1] == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("calibration map: converged intensities have a vanishing map residual") {
    const Instance inst = three_state(1.0, LawKind::Gamma);
    const SolveContext ctx = make_solve_context(inst);
    const Solution sol = solve_negbinomial(inst, 4);
    const Vec lam = full_lambda(inst.size(), sol.lambda);
    const Vec mapped = apply_A_eps(ctx, lam, inst.probs, 0.0, 4, 1.0);
    CHECK(testsup::linf(mapped, lam) < 1e-8);
}

TEST_CASE("stage count one reproduces the exponential solution") {
    for (std::uint64_t seed = 300; seed <= 330; ++seed) {
        const Instance inst = testsup::random_instance(seed);
        const Solution exp_sol = solve_exponential(inst);
        const Solution nb_sol = solve_negbinomial(inst, 1);
        CHECK(testsup::linf(exp_sol.lambda, nb_sol.lambda) < 1e-10);
        CHECK(std::abs(exp_sol.alpha - nb_sol.alpha) < 1e-12);
        CHECK(exp_sol.split == nb_sol.split);
        CHECK(std::abs(exp_sol.beta - nb_sol.beta) < 1e-10);
    }
}

TEST_CASE("gamma stages: no killing keeps survival certain") {
    const Solution sol = solve_negbinomial(three_state(0.0, LawKind::Gamma), 4);
    CHECK(sol.alpha == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sol.diag.oracle_residual < 1e-8);
    CHECK(sol.diag.fixed_point_residual < 1e-8);
}

TEST_CASE("gamma stages with killing: alpha respects its bracket and the oracle") {
    const Instance inst = three_state(1.0, LawKind::Gamma);
    for (int r : {1, 2, 4, 8}) {
        const Solution sol = solve_negbinomial(inst, r);
        const double star = kill_star(inst, sol.lambda);
        const double lower = std::pow(1.0 + star * inst.law.t / r, -r);
        CHECK(sol.alpha >= lower - 1e-12);
        CHECK(sol.alpha <= 1.0);
        CHECK(sol.diag.oracle_residual < 1e-8);
        CHECK(sol.diag.fixed_point_residual < 1e-8);
    }
}

TEST_CASE("fixed point failure carries a residual trace") {
    SolverOptions opts;
    opts.max_iterations_per_level = 1;
    opts.tol_fixed_point = 0.0;  // unattainable by construction
    const Instance inst = three_state(1.5, LawKind::Gamma);
    try {
        solve_negbinomial(inst, 4, opts);
        FAIL("expected SolverFailure");
    } catch (const SolverFailure& e) {
        CHECK(!e.residual_trace.empty());
    }
}

TEST_CASE("deterministic time: symmetric no-killing instance has lambda = ln 2") {
    const Solution sol = solve_deterministic(three_state(0.0, LawKind::Deterministic));
    CHECK(sol.diag.converged);
    CHECK(sol.lambda[0] == doctest::Approx(std::log(2.0)).epsilon(1e-9));
    CHECK(sol.alpha == doctest::Approx(1.0));
    CHECK(sol.diag.residual < 1e-6);

    const Instance inst = three_state(0.0, LawKind::Deterministic);
    const VerifyReport rep = verify_solution(inst, sol);
    CHECK(rep.max_abs_deviation < 1e-6);
}

TEST_CASE("deterministic time with killing: survival bound holds") {
    const Instance inst = three_state(1.0, LawKind::Deterministic);
    const Solution sol = solve_deterministic(inst);
    CHECK(sol.diag.converged);
    CHECK(sol.diag.residual < 1e-6);
    CHECK(sol.alpha >= std::exp(-inst.law.t * kill_star(inst, sol.lambda)) - 1e-9);
}

TEST_CASE("deterministic time on small random instances") {
    for (std::uint64_t seed = 700; seed <= 706; ++seed) {
        Instance inst = testsup::random_instance(seed, 4 + static_cast<int>(seed % 3), 1.0);
        inst.law.kind = LawKind::Deterministic;
        const Solution sol = solve_deterministic(inst);
        CHECK(sol.diag.converged);
        CHECK(sol.diag.residual < 1e-6);
        CHECK(sol.beta > 0.0);
        CHECK(sol.beta <= 1.0);
    }
}

TEST_CASE("drift is fully absorbed by the coordinate change") {
    for (std::uint64_t seed = 800; seed <= 815; ++seed) {
        const Instance inst = testsup::random_instance(seed);
        const CoordinateMap map = build_kappa(inst.grid, inst.drift, inst.probs);
        const Instance flat = kappa_companion(inst, map);
        REQUIRE(validate_instance(flat).ok());
        const Solution a = solve_exponential(inst);
        const Solution b = solve_exponential(flat);
        CHECK(testsup::linf(a.lambda, b.lambda) < 1e-10);
        CHECK(std::abs(a.alpha - b.alpha) < 1e-12);
        CHECK(a.split == b.split);
        CHECK(std::abs(a.beta - b.beta) < 1e-10);
    }
}

TEST_CASE("solution fields are invariant to the anchor quantile") {
    for (std::uint64_t seed = 900; seed <= 910; ++seed) {
        const Instance inst = testsup::random_instance(seed);
        SolverOptions opts;
        opts.anchor_quantile = 0.25;
        const Solution base = solve_exponential(inst, opts);
        for (double q : {0.125, 0.375}) {
            opts.anchor_quantile = q;
            const Solution other = solve_exponential(inst, opts);
            CHECK(testsup::linf(base.lambda, other.lambda) < 1e-10);
            CHECK(std::abs(base.alpha - other.alpha) < 1e-12);
            CHECK(base.split == other.split);
            CHECK(std::abs(base.beta - other.beta) < 1e-10);
        }
    }
}

TEST_CASE("anderson acceleration lands on the same fixed point") {
    const Instance inst = three_state(1.0, LawKind::Gamma);
    SolverOptions opts;
    const Solution plain = solve_negbinomial(inst, 4, opts);
    opts.anderson = true;
    const Solution accel = solve_negbinomial(inst, 4, opts);
    CHECK(testsup::linf(plain.lambda, accel.lambda) < 1e-7);
}

TEST_CASE("string measure halves when the clock doubles") {
    const Instance inst = three_state(1.0);
    const Solution sol = solve_exponential(inst);
    Vec doubled = sol.lambda;
    for (double& l : doubled) l *= 2.0;
    const StringMeasureTable a = string_measure(inst.grid, sol.lambda);
    const StringMeasureTable b = string_measure(inst.grid, doubled);
    for (int j = 1; j + 1 < a.size(); ++j)
        CHECK(b.m[j] == doctest::Approx(0.5 * a.m[j]).epsilon(1e-15));
}

TEST_CASE("monte carlo cross-check rides along with verification") {
    const Instance inst = three_state(1.0);
    const Solution sol = solve_exponential(inst);
    VerifyOptions vo;
    vo.mc_check = true;
    vo.mc_paths = 200000;
    vo.seed = 17;
    const VerifyReport rep = verify_solution(inst, sol, vo);
    CHECK(rep.mc_tv >= 0.0);
    CHECK(rep.mc_tv < 1e-2);
}

TEST_CASE("verifier detects a tampered intensity") {
    const Instance inst = three_state(1.0);
    Solution sol = solve_exponential(inst);
    CHECK(verify_solution(inst, sol).max_abs_deviation < 1e-12);
    sol.lambda[0] *= 1.1;
    CHECK(verify_solution(inst, sol).max_abs_deviation > 1e-3);
}

TEST_CASE("verifier runs the law-matched oracle for gamma stopping") {
    Instance inst = three_state(1.0, LawKind::Gamma);
    inst.law.r = 4;
    const Solution sol = solve_negbinomial(inst, 4);
    const VerifyReport rep = verify_solution(inst, sol);
    CHECK(rep.max_abs_deviation < 1e-8);
    CHECK(rep.target.w.back() == doctest::Approx(1.0 - sol.alpha));
}

TEST_CASE("dispatcher follows the law kind") {
    Instance inst = three_state(1.0, LawKind::Exponential);
    CHECK(solve(inst).diag.r_used == 1);
    inst.law.kind = LawKind::Gamma;
    inst.law.r = 2;
    CHECK(solve(inst).diag.r_used == 2);
    inst.law.kind = LawKind::Deterministic;
    const Solution det = solve(inst);
    CHECK(det.diag.converged);
}
