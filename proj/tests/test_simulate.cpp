// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gapclock/simulate.hpp"
#include "gapclock/solvers.hpp"
#include "support.hpp"

using namespace gapclock;

namespace {

Instance three_state(double k2, LawKind kind = LawKind::Exponential) {
    Instance inst;
    inst.grid.states = {0.0, 1.0, 2.0};
    inst.probs = {0.25, 0.5, 0.25};
    inst.drift = {0.0};
    inst.killing = {k2};
    inst.law = TimeLaw{kind, 1.0, 1, 0.0};
    return inst;
}

}  // namespace

TEST_CASE("zero intensity: every path stays put") {
    const Instance inst = three_state(1.0);
    SimulateOptions opts;
    opts.n_paths = 5000;
    const MixtureState out = simulate(inst, {0.0, 0.0, 0.0}, delta_state(3, 1), opts);
    CHECK(out.w[1] == 1.0);
}

TEST_CASE("no killing: the cemetery stays empty") {
    const Instance inst = three_state(0.0);
    SimulateOptions opts;
    opts.n_paths = 20000;
    const MixtureState out = simulate(inst, {0.0, 1.0, 0.0}, delta_state(3, 1), opts);
    CHECK(out.cemetery() == 0.0);
}

TEST_CASE("killed exponential marginal matches the closed form within binomial error") {
    const Instance inst = three_state(1.0);
    SimulateOptions opts;
    opts.n_paths = 1000000;
    opts.seed = 7;
    const MixtureState emp = simulate(inst, {0.0, 1.0, 0.0}, delta_state(3, 1), opts);
    const MixtureState target{{1.0 / 6.0, 1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0}};
    CHECK(total_variation(emp, target) < 5e-3);
}

TEST_CASE("results are reproducible and schedule independent") {
    const Instance inst = three_state(1.0);
    SimulateOptions opts;
    opts.n_paths = 60000;
    opts.seed = 11;
    opts.threads = 1;
    const MixtureState a = simulate(inst, {0.0, 1.0, 0.0}, delta_state(3, 1), opts);
    opts.threads = 3;
    const MixtureState b = simulate(inst, {0.0, 1.0, 0.0}, delta_state(3, 1), opts);
    CHECK(testsup::linf(a.w, b.w) == 0.0);
    const MixtureState c = simulate(inst, {0.0, 1.0, 0.0}, delta_state(3, 1), opts);
    CHECK(testsup::linf(b.w, c.w) == 0.0);
}

TEST_CASE("geometric clock approaches the exponential marginal as the step shrinks") {
    Instance inst = three_state(1.0, LawKind::Geometric);
    inst.law.h = 0.01;
    SimulateOptions opts;
    opts.n_paths = 400000;
    opts.seed = 3;
    const MixtureState emp = simulate(inst, {0.0, 1.0, 0.0}, delta_state(3, 1), opts);
    const MixtureState target{{1.0 / 6.0, 1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0}};
    CHECK(total_variation(emp, target) < 1e-2);
}

TEST_CASE("stage-count clocks agree with the resolvent-power oracle") {
    for (std::uint64_t seed = 20; seed <= 22; ++seed) {
        Instance inst = testsup::random_instance(seed, 4, 1.0);
        inst.law.kind = LawKind::Gamma;
        inst.law.r = 3;
        const ChainContext ctx = make_chain_context(inst);
        Vec lam(inst.size(), 0.0);
        testsup::Rng rng(seed);
        for (int j = 1; j + 1 < inst.size(); ++j) lam[j] = rng.range(0.3, 2.0);

        const ResolventMatrix N = build_resolvent(ctx, lam, inst.law.t / inst.law.r);
        const MixtureState start = delta_state(inst.size(), 1);
        const MixtureState oracle = resolvent_inverse_power(N, start, inst.law.r);

        SimulateOptions opts;
        opts.n_paths = 400000;
        opts.seed = seed;
        const MixtureState gamma_emp = simulate(inst, lam, start, opts);
        CHECK(total_variation(gamma_emp, oracle) < 8e-3);

        inst.law.kind = LawKind::NegBinomial;
        inst.law.h = 0.005;
        const MixtureState nb_emp = simulate(inst, lam, start, opts);
        CHECK(total_variation(nb_emp, oracle) < 2e-2);
    }
}

TEST_CASE("deterministic clock agrees with the uniformized marginal") {
    Instance inst = three_state(1.0, LawKind::Deterministic);
    const ChainContext ctx = make_chain_context(inst);
    const Vec lam{0.0, 1.3, 0.0};
    const MixtureState oracle =
        expm_marginal(build_intensity(ctx, lam), delta_state(3, 1), inst.law.t);
    SimulateOptions opts;
    opts.n_paths = 400000;
    opts.seed = 5;
    const MixtureState emp = simulate(inst, lam, delta_state(3, 1), opts);
    CHECK(total_variation(emp, oracle) < 8e-3);
}

TEST_CASE("three oracles agree on the no-killing instance") {
    const Instance inst = three_state(0.0);
    const ChainContext ctx = make_chain_context(inst);
    const Vec lam{0.0, 1.0, 0.0};
    const MixtureState start = delta_state(3, 1);

    const MixtureState via_resolvent =
        resolvent_inverse_power(build_resolvent(ctx, lam, 1.0), start, 1);
    SimulateOptions opts;
    opts.n_paths = 400000;
    opts.seed = 9;
    const MixtureState via_mc = simulate(inst, lam, start, opts);
    CHECK(total_variation(via_mc, via_resolvent) < 8e-3);

    Instance det = inst;
    det.law.kind = LawKind::Deterministic;
    const MixtureState via_expm =
        expm_marginal(build_intensity(ctx, lam), start, 1.0);
    const MixtureState det_mc = simulate(det, lam, start, opts);
    CHECK(total_variation(det_mc, via_expm) < 8e-3);
}

TEST_CASE("per-path streams do not collide across neighbouring seeds") {
    const Instance inst = three_state(1.0);
    SimulateOptions a, b;
    a.n_paths = b.n_paths = 50000;
    a.seed = 1;
    b.seed = 2;
    const MixtureState ma = simulate(inst, {0.0, 1.0, 0.0}, delta_state(3, 1), a);
    const MixtureState mb = simulate(inst, {0.0, 1.0, 0.0}, delta_state(3, 1), b);
    CHECK(testsup::linf(ma.w, mb.w) > 0.0);  // different seeds, different noise
}
