// SPDX-License-Identifier: Apache-2.0
#include "gapclock/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gapclock {

using nlohmann::json;

std::string format_double17(double v) {
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    if (std::isnan(v)) return "\"nan\"";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void dump17_rec(const json& j, std::string& out, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in + json(it.key()).dump() + ": ";
                dump17_rec(it.value(), out, indent, depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[";
            bool first = true;
            for (const auto& el : j) {
                if (!first) out += ", ";
                first = false;
                dump17_rec(el, out, indent, depth + 1);
            }
            out += "]";
            return;
        }
        case json::value_t::number_float:
            out += format_double17(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

LawKind law_kind_from_string(const std::string& s) {
    if (s == "geometric") return LawKind::Geometric;
    if (s == "exponential") return LawKind::Exponential;
    if (s == "negbinomial") return LawKind::NegBinomial;
    if (s == "gamma") return LawKind::Gamma;
    if (s == "deterministic") return LawKind::Deterministic;
    throw IoError("unknown law kind '" + s + "'");
}

Vec vec_from(const json& j, const char* key) {
    if (!j.contains(key)) throw IoError(std::string("missing array '") + key + "'");
    return j.at(key).get<Vec>();
}

FieldTable field_from_json(const json& j) {
    FieldTable f;
    if (j.is_null()) return f;
    for (const auto& p : j.value("pieces", json::array()))
        f.pieces.push_back({p.at("lo").get<double>(), p.at("hi").get<double>(),
                            p.at("value").get<double>()});
    for (const auto& a : j.value("atoms", json::array()))
        f.atoms.push_back({a.at("x").get<double>(), a.at("w").get<double>()});
    return f;
}

}  // namespace

std::string dump17(const json& j, int indent) {
    std::string out;
    dump17_rec(j, out, indent, 0);
    out += "\n";
    return out;
}

Instance instance_from_json(const json& j) {
    Instance inst;
    inst.grid.states = vec_from(j, "states");
    inst.probs = vec_from(j, "probs");
    inst.drift = vec_from(j, "drift");
    inst.killing = vec_from(j, "killing");
    inst.law.t = j.at("t").get<double>();
    const json& law = j.at("law");
    inst.law.kind = law_kind_from_string(law.at("kind").get<std::string>());
    inst.law.r = law.value("r", 1);
    inst.law.h = law.value("h", 0.0);
    return inst;
}

json instance_to_json(const Instance& inst) {
    json law{{"kind", law_kind_name(inst.law.kind)}};
    if (inst.law.kind == LawKind::NegBinomial || inst.law.kind == LawKind::Gamma)
        law["r"] = inst.law.r;
    if (inst.law.kind == LawKind::Geometric || inst.law.kind == LawKind::NegBinomial)
        law["h"] = inst.law.h;
    return json{{"states", inst.grid.states}, {"probs", inst.probs},  {"drift", inst.drift},
                {"killing", inst.killing},    {"t", inst.law.t},      {"law", law}};
}

Solution solution_from_json(const json& j) {
    Solution sol;
    sol.lambda = vec_from(j, "lambda");
    sol.alpha = j.at("alpha").get<double>();
    sol.beta = j.at("beta").get<double>();
    sol.split = j.at("l").get<int>() - 1;
    sol.x0 = j.at("x0").get<double>();
    sol.x0_kappa = j.value("x0_kappa", 0.0);
    if (j.contains("diagnostics")) {
        const json& d = j.at("diagnostics");
        sol.diag.residual = d.value("residual", 0.0);
        sol.diag.fixed_point_residual = d.value("fixed_point_residual", 0.0);
        sol.diag.oracle_residual = d.value("oracle_residual", 0.0);
        sol.diag.iterations = d.value("iterations", 0);
        sol.diag.r_used = d.value("r_used", 1);
        sol.diag.eps_reached = d.value("eps_reached", 0.0);
        sol.diag.converged = d.value("converged", true);
    }
    return sol;
}

json solution_to_json(const Solution& sol) {
    json sm;
    if (sol.string_measure.size() >= 3) {
        const auto& t = sol.string_measure;
        Vec states(t.states.begin() + 1, t.states.end() - 1);
        Vec m(t.m.begin() + 1, t.m.end() - 1);
        Vec a(t.a.begin() + 1, t.a.end() - 1);
        Vec lam(t.lambda.begin() + 1, t.lambda.end() - 1);
        sm = json{{"states", states},
                  {"m", m},
                  {"a", a},
                  {"lambda", lam},
                  {"endpoint_states", Vec{t.states.front(), t.states.back()}},
                  {"endpoint_m", "infinite"}};
    }
    return json{{"lambda", sol.lambda},
                {"alpha", sol.alpha},
                {"beta", sol.beta},
                {"l", sol.split + 1},
                {"x0", sol.x0},
                {"x0_kappa", sol.x0_kappa},
                {"string_measure", sm},
                {"diagnostics",
                 json{{"residual", sol.diag.residual},
                      {"fixed_point_residual", sol.diag.fixed_point_residual},
                      {"oracle_residual", sol.diag.oracle_residual},
                      {"iterations", sol.diag.iterations},
                      {"r_used", sol.diag.r_used},
                      {"eps_reached", sol.diag.eps_reached},
                      {"converged", sol.diag.converged}}}};
}

ContinuousSpec continuous_spec_from_json(const json& j) {
    ContinuousSpec spec;
    if (!j.contains("measure")) throw IoError("missing 'measure' array");
    for (const auto& c : j.at("measure")) {
        MeasureComponent comp;
        const std::string type = c.at("type").get<std::string>();
        comp.weight = c.at("w").get<double>();
        if (type == "point") {
            comp.kind = MeasureComponent::Kind::Point;
            comp.x = c.at("x").get<double>();
        } else if (type == "uniform") {
            comp.kind = MeasureComponent::Kind::Uniform;
            comp.lo = c.at("lo").get<double>();
            comp.hi = c.at("hi").get<double>();
        } else if (type == "truncnormal") {
            comp.kind = MeasureComponent::Kind::TruncNormal;
            comp.mean = c.at("mean").get<double>();
            comp.sigma = c.at("sigma").get<double>();
            comp.lo = c.at("lo").get<double>();
            comp.hi = c.at("hi").get<double>();
        } else if (type == "quantile_table") {
            comp.kind = MeasureComponent::Kind::QuantileTable;
            comp.levels = c.at("levels").get<Vec>();
            comp.values = c.at("values").get<Vec>();
        } else {
            throw IoError("unknown measure component type '" + type + "'");
        }
        spec.measure.components.push_back(std::move(comp));
    }
    spec.drift = field_from_json(j.value("drift", json()));
    spec.killing = field_from_json(j.value("killing", json()));
    spec.law.t = j.at("t").get<double>();
    const json& law = j.at("law");
    spec.law.kind = law_kind_from_string(law.at("kind").get<std::string>());
    spec.law.r = law.value("r", 1);
    spec.law.h = law.value("h", 0.0);
    return spec;
}

json hypothesis_to_json(const HypothesisReport& rep) {
    return json{{"neighborhood_sup", rep.neighborhood_sup},
                {"gamma", rep.gamma},
                {"c_gamma", rep.c_gamma},
                {"part3_literal", rep.part3_literal},
                {"part3_atoms", rep.part3_atoms},
                {"part2_pass", rep.part2_pass},
                {"part3_pass", rep.part3_pass},
                {"part4_pass", rep.part4_pass},
                {"part4_probe_x", rep.part4_probe_x},
                {"part4_probe_value", rep.part4_probe_value},
                {"all_pass", rep.all_pass()}};
}

json verify_to_json(const VerifyReport& rep) {
    json out{{"max_abs_deviation", rep.max_abs_deviation},
             {"oracle_marginal", rep.oracle.w},
             {"target_marginal", rep.target.w}};
    if (rep.mc_tv >= 0.0) out["mc_total_variation"] = rep.mc_tv;
    return out;
}

json sweep_to_json(const SweepReport& rep) {
    json levels = json::array();
    for (const auto& lvl : rep.levels) {
        json l{{"level", lvl.level},
               {"states", lvl.states},
               {"solved", lvl.solved},
               {"kappa_abs_moment", lvl.kappa_abs_moment},
               {"drift_margin", lvl.drift_margin}};
        if (lvl.solved) {
            l["alpha"] = lvl.solution.alpha;
            l["residual"] = lvl.solution.diag.residual;
            l["converged"] = lvl.solution.diag.converged;
        } else {
            l["error"] = lvl.error;
        }
        levels.push_back(std::move(l));
    }
    return json{{"hypothesis", hypothesis_to_json(rep.hypothesis)},
                {"gated", rep.gated},
                {"levels", levels},
                {"discrepancy", rep.discrepancy},
                {"discrepancy_decreasing", rep.discrepancy_decreasing},
                {"window", Vec{rep.window_lo, rep.window_hi}}};
}

Instance load_instance(const std::string& path) { return instance_from_json(load_json(path)); }

Solution load_solution(const std::string& path) { return solution_from_json(load_json(path)); }

ContinuousSpec load_continuous_spec(const std::string& path) {
    return continuous_spec_from_json(load_json(path));
}

void save_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write to '" + path + "' failed");
}

json load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError("cannot parse '" + path + "': " + e.what());
    }
}

namespace {

std::string csv_num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string string_measure_csv(const StringMeasureTable& table) {
    std::string out = "state,m,a,lambda\n";
    for (int j = 0; j < table.size(); ++j) {
        out += csv_num(table.states[j]) + "," + csv_num(table.m[j]) + "," + csv_num(table.a[j]) +
               "," + csv_num(table.lambda[j]) + "\n";
    }
    return out;
}

std::string sweep_csv(const SweepReport& rep) {
    std::string out = "level,states,solved,alpha,residual,kappa_abs_moment,discrepancy_to_next\n";
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
        const auto& lvl = rep.levels[i];
        out += std::to_string(lvl.level) + "," + std::to_string(lvl.states) + "," +
               (lvl.solved ? "1" : "0") + ",";
        out += lvl.solved ? csv_num(lvl.solution.alpha) : std::string("");
        out += ",";
        out += lvl.solved ? csv_num(lvl.solution.diag.residual) : std::string("");
        out += "," + csv_num(lvl.kappa_abs_moment) + ",";
        out += i < rep.discrepancy.size() ? csv_num(rep.discrepancy[i]) : std::string("");
        out += "\n";
    }
    return out;
}

}  // namespace gapclock
