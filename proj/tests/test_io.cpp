// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gapclock/io.hpp"
#include "gapclock/solvers.hpp"
#include "support.hpp"

using namespace gapclock;
using nlohmann::json;

TEST_CASE("doubles render at 17 significant digits and round-trip exactly") {
    for (double v : {1.0 / 3.0, 2.0 / 3.0, 1e-17, 0.25, 123456.789, 6.02214076e23}) {
        const std::string s = format_double17(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_double17(0.25) == "0.25");
}

TEST_CASE("instance serialization round-trips byte for byte") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Instance inst = testsup::random_instance(seed);
        inst.law.kind = seed % 2 ? LawKind::Gamma : LawKind::Exponential;
        inst.law.r = 3;
        const std::string once = dump17(instance_to_json(inst));
        const Instance back = instance_from_json(json::parse(once));
        const std::string twice = dump17(instance_to_json(back));
        CHECK(once == twice);
        CHECK(back.grid.states == inst.grid.states);
        CHECK(back.probs == inst.probs);
        CHECK(back.drift == inst.drift);
        CHECK(back.killing == inst.killing);
        CHECK(back.law.kind == inst.law.kind);
    }
}

TEST_CASE("solution serialization preserves the calibrated fields") {
    Instance inst;
    inst.grid.states = {0.0, 1.0, 2.0};
    inst.probs = {0.25, 0.5, 0.25};
    inst.drift = {0.0};
    inst.killing = {1.0};
    inst.law = TimeLaw{LawKind::Exponential, 1.0, 1, 0.0};
    const Solution sol = solve_exponential(inst);
    const json j = solution_to_json(sol);
    CHECK(j.at("l").get<int>() == 2);  // split is reported 1-based
    const Solution back = solution_from_json(j);
    CHECK(back.lambda == sol.lambda);
    CHECK(back.alpha == sol.alpha);
    CHECK(back.beta == sol.beta);
    CHECK(back.split == sol.split);
    CHECK(back.x0 == sol.x0);
    CHECK(back.diag.converged == sol.diag.converged);
}

TEST_CASE("continuous spec parsing covers every component kind") {
    const json j = json::parse(R"({
        "measure": [
            {"type": "point", "x": 0.0, "w": 0.25},
            {"type": "uniform", "lo": 1.0, "hi": 2.0, "w": 0.25},
            {"type": "truncnormal", "mean": 3.0, "sigma": 0.5, "lo": 2.5, "hi": 3.5, "w": 0.25},
            {"type": "quantile_table", "levels": [0.0, 1.0], "values": [4.0, 5.0], "w": 0.25}
        ],
        "drift": {"pieces": [{"lo": 0.0, "hi": 5.0, "value": 0.1}], "atoms": [{"x": 0.0, "w": 0.05}]},
        "killing": {"pieces": [{"lo": 0.0, "hi": 5.0, "value": 0.3}]},
        "t": 2.0,
        "law": {"kind": "deterministic"}
    })");
    const ContinuousSpec spec = continuous_spec_from_json(j);
    spec.measure.validate();
    CHECK(spec.measure.components.size() == 4);
    CHECK(spec.drift.pieces.size() == 1);
    CHECK(spec.drift.atoms.size() == 1);
    CHECK(spec.law.kind == LawKind::Deterministic);
    CHECK(spec.law.t == 2.0);
    CHECK(spec.measure.cdf(5.0) == doctest::Approx(1.0));
}

TEST_CASE("unknown law kinds and malformed files raise io errors") {
    CHECK_THROWS_AS(instance_from_json(json::parse(R"({"states": [0, 1, 2], "probs": [1],
        "drift": [], "killing": [], "t": 1, "law": {"kind": "weibull"}})")),
                    IoError);
    CHECK_THROWS_AS(load_json("/nonexistent/path.json"), IoError);
}

TEST_CASE("string measure csv flags infinite endpoints") {
    Instance inst;
    inst.grid.states = {0.0, 1.0, 2.0};
    inst.probs = {0.25, 0.5, 0.25};
    inst.drift = {0.0};
    inst.killing = {0.0};
    inst.law = TimeLaw{LawKind::Exponential, 1.0, 1, 0.0};
    const Solution sol = solve_exponential(inst);
    const std::string csv = string_measure_csv(sol.string_measure);
    CHECK(csv.find("state,m,a,lambda") == 0);
    CHECK(csv.find("inf") != std::string::npos);
    CHECK(csv.find(",2,") != std::string::npos);  // m_2 = 2 at unit intensity
}

TEST_CASE("verify and hypothesis reports serialize cleanly") {
    Instance inst;
    inst.grid.states = {0.0, 1.0, 2.0};
    inst.probs = {0.25, 0.5, 0.25};
    inst.drift = {0.0};
    inst.killing = {1.0};
    inst.law = TimeLaw{LawKind::Exponential, 1.0, 1, 0.0};
    const Solution sol = solve_exponential(inst);
    const VerifyReport rep = verify_solution(inst, sol);
    const json vj = verify_to_json(rep);
    CHECK(vj.contains("max_abs_deviation"));
    CHECK(vj.at("oracle_marginal").size() == 4);

    ContinuousSpec spec;
    MeasureComponent uni;
    uni.kind = MeasureComponent::Kind::Uniform;
    uni.weight = 1.0;
    uni.lo = 0.0;
    uni.hi = 1.0;
    spec.measure.components = {uni};
    spec.law = TimeLaw{LawKind::Deterministic, 1.0, 1, 0.0};
    const json hj = hypothesis_to_json(hypothesis_check(spec));
    CHECK(hj.at("all_pass").get<bool>());
    const std::string text = dump17(hj);
    CHECK(json::parse(text).at("gamma").get<double>() == 0.5);
}
