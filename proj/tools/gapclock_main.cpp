// SPDX-License-Identifier: Apache-2.0
//
// gapclock CLI: solve | verify | simulate | atomize | sweep | hypcheck.
// Exit codes: 0 success, 1 validation failure, 2 solver non-convergence,
// 3 I/O failure. Errors are reported as JSON on standard error.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "gapclock/io.hpp"
#include "gapclock/simulate.hpp"

namespace {

using gapclock::IoError;
using gapclock::SolverFailure;
using nlohmann::json;

void emit_error(const std::string& cls, const std::string& message) {
    std::cerr << json{{"error", {{"class", cls}, {"message", message}}}}.dump() << "\n";
}

struct CommonFlags {
    double t_override = -1.0;
    int r_override = 0;
    double h_override = -1.0;
    gapclock::SolverOptions opts;
    std::uint64_t seed = 1;
    long long paths = 1000000;
    std::string f_reading = "literal";
    bool mc_check = false;
};

void apply_law_overrides(gapclock::Instance& inst, const CommonFlags& flags) {
    if (flags.t_override > 0.0) inst.law.t = flags.t_override;
    if (flags.r_override > 0) inst.law.r = flags.r_override;
    if (flags.h_override >= 0.0) inst.law.h = flags.h_override;
}

gapclock::Instance load_valid_instance(const std::string& path, const CommonFlags& flags) {
    gapclock::Instance inst = gapclock::load_instance(path);
    apply_law_overrides(inst, flags);
    const gapclock::ValidationReport rep = gapclock::validate_instance(inst);
    if (!rep.ok()) throw std::invalid_argument("invalid instance: " + rep.joined());
    return inst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Birth-death clock calibration for prescribed stopping-time marginals"};
    app.require_subcommand(1);
    // Long-only help so the spec'd --h law override stays available.
    app.set_help_flag("--help", "print help");

    CommonFlags flags;
    std::string input, output, solution_path, csv_path;
    int level = 3, n_lo = 3, n_hi = 6;
    double verify_tol = -1.0;  // < 0: pick the law-appropriate solver tolerance

    auto add_solver_flags = [&](CLI::App* cmd) {
        cmd->set_help_flag("--help", "print help");
        cmd->add_option("--t", flags.t_override, "override horizon t");
        cmd->add_option("--r", flags.r_override, "override stage count r");
        cmd->add_option("--h", flags.h_override, "override discrete step h");
        cmd->add_option("--tol", flags.opts.tol_fixed_point, "fixed-point tolerance");
        cmd->add_option("--eps-floor", flags.opts.eps_floor, "smallest projection level");
        cmd->add_option("--r-max", flags.opts.r_max, "continuation cap for deterministic time");
        cmd->add_option("--damping", flags.opts.damping, "initial Picard damping");
        cmd->add_option("--anchor-quantile", flags.opts.anchor_quantile,
                        "coordinate-change anchor quantile");
        cmd->add_flag("--anderson", flags.opts.anderson, "enable Anderson acceleration");
        cmd->add_option("--seed", flags.seed, "random seed");
    };

    CLI::App* solve = app.add_subcommand("solve", "calibrate an instance file");
    solve->add_option("-i,--input", input, "instance JSON")->required();
    solve->add_option("-o,--output", output, "solution JSON")->required();
    solve->add_option("--csv", csv_path, "also write the string measure as CSV");
    add_solver_flags(solve);

    CLI::App* verify = app.add_subcommand("verify", "check a solution against the oracle");
    verify->set_help_flag("--help", "print help");
    verify->add_option("-i,--input", input, "instance JSON")->required();
    verify->add_option("-s,--solution", solution_path, "solution JSON")->required();
    verify->add_option("-o,--output", output, "report JSON (stdout when omitted)");
    verify->add_option("--tol", verify_tol,
                       "deviation tolerance for the exit status (default: the "
                       "law-appropriate solver tolerance)");
    verify->add_flag("--mc-check", flags.mc_check, "add a Monte Carlo cross-check");
    verify->add_option("--paths", flags.paths, "Monte Carlo path count");
    verify->add_option("--seed", flags.seed, "random seed");
    verify->add_option("--t", flags.t_override, "override horizon t");
    verify->add_option("--r", flags.r_override, "override stage count r");
    verify->add_option("--h", flags.h_override, "override discrete step h");

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo marginal for a solution");
    simulate->set_help_flag("--help", "print help");
    simulate->add_option("-i,--input", input, "instance JSON")->required();
    simulate->add_option("-s,--solution", solution_path, "solution JSON")->required();
    simulate->add_option("-o,--output", output, "report JSON (stdout when omitted)");
    simulate->add_option("--paths", flags.paths, "path count");
    simulate->add_option("--seed", flags.seed, "random seed");
    simulate->add_option("--t", flags.t_override, "override horizon t");
    simulate->add_option("--r", flags.r_override, "override stage count r");
    simulate->add_option("--h", flags.h_override, "override discrete step h");

    CLI::App* atomize = app.add_subcommand("atomize", "quantile-discretize a continuous spec");
    atomize->add_option("-i,--input", input, "continuous spec JSON")->required();
    atomize->add_option("-o,--output", output, "instance JSON")->required();
    atomize->add_option("-N,--level", level, "refinement level")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "refinement convergence sweep");
    sweep->add_option("-i,--input", input, "continuous spec JSON")->required();
    sweep->add_option("-o,--output", output, "report JSON")->required();
    sweep->add_option("--csv", csv_path, "also write per-level results as CSV");
    sweep->add_option("--n-lo", n_lo, "first level");
    sweep->add_option("--n-hi", n_hi, "last level");
    add_solver_flags(sweep);

    CLI::App* hypcheck = app.add_subcommand("hypcheck", "numeric hypothesis evidence");
    hypcheck->add_option("-i,--input", input, "continuous spec JSON")->required();
    hypcheck->add_option("-o,--output", output, "report JSON (stdout when omitted)");
    hypcheck->add_option("--f-reading", flags.f_reading,
                         "partition supremum reading: literal|atoms (both are reported)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            const gapclock::Instance inst = load_valid_instance(input, flags);
            const gapclock::Solution sol = gapclock::solve(inst, flags.opts);
            gapclock::save_text(output, gapclock::dump17(gapclock::solution_to_json(sol)));
            if (!csv_path.empty())
                gapclock::save_text(csv_path, gapclock::string_measure_csv(sol.string_measure));
            if (!sol.diag.converged) {
                emit_error("solver", "solution flagged non-converged; see diagnostics");
                return 2;
            }
        } else if (verify->parsed()) {
            const gapclock::Instance inst = load_valid_instance(input, flags);
            const gapclock::Solution sol = gapclock::load_solution(solution_path);
            gapclock::VerifyOptions vo;
            vo.mc_check = flags.mc_check;
            vo.mc_paths = flags.paths;
            vo.seed = flags.seed;
            const gapclock::VerifyReport rep = gapclock::verify_solution(inst, sol, vo);
            const std::string text = gapclock::dump17(gapclock::verify_to_json(rep));
            if (output.empty())
                std::cout << text;
            else
                gapclock::save_text(output, text);
            if (verify_tol < 0.0)
                verify_tol = inst.law.kind == gapclock::LawKind::Deterministic
                                 ? flags.opts.tol_deterministic
                                 : flags.opts.tol_fixed_point;
            if (rep.max_abs_deviation > verify_tol) {
                emit_error("solver", "oracle deviation " +
                                         gapclock::format_double17(rep.max_abs_deviation) +
                                         " above tolerance");
                return 2;
            }
        } else if (simulate->parsed()) {
            const gapclock::Instance inst = load_valid_instance(input, flags);
            const gapclock::Solution sol = gapclock::load_solution(solution_path);
            gapclock::SimulateOptions so;
            so.n_paths = flags.paths;
            so.seed = flags.seed;
            const gapclock::Vec lam = gapclock::full_lambda(inst.size(), sol.lambda);
            const gapclock::MixtureState start =
                gapclock::start_mixture(inst.size(), sol.split, sol.beta);
            const gapclock::MixtureState emp = gapclock::simulate(inst, lam, start, so);
            gapclock::MixtureState target{gapclock::Vec(inst.size() + 1, 0.0)};
            for (int j = 0; j < inst.size(); ++j) target.w[j] = sol.alpha * inst.probs[j];
            target.w[inst.size()] = 1.0 - sol.alpha;
            const json rep{{"empirical_marginal", emp.w},
                           {"target_marginal", target.w},
                           {"total_variation", gapclock::total_variation(emp, target)},
                           {"paths", flags.paths},
                           {"seed", flags.seed}};
            const std::string text = gapclock::dump17(rep);
            if (output.empty())
                std::cout << text;
            else
                gapclock::save_text(output, text);
        } else if (atomize->parsed()) {
            const gapclock::ContinuousSpec spec = gapclock::load_continuous_spec(input);
            const gapclock::AtomizedInstance at = gapclock::atomize(spec, level);
            const gapclock::ValidationReport rep = gapclock::validate_instance(at.instance);
            if (!rep.ok())
                throw std::invalid_argument("atomized instance invalid: " + rep.joined());
            gapclock::save_text(output, gapclock::dump17(gapclock::instance_to_json(at.instance)));
        } else if (sweep->parsed()) {
            const gapclock::ContinuousSpec spec = gapclock::load_continuous_spec(input);
            const gapclock::SweepReport rep = gapclock::refinement_sweep(spec, n_lo, n_hi,
                                                                         flags.opts);
            gapclock::save_text(output, gapclock::dump17(gapclock::sweep_to_json(rep)));
            if (!csv_path.empty()) gapclock::save_text(csv_path, gapclock::sweep_csv(rep));
            if (rep.gated) {
                emit_error("validation", "hypothesis check failed; sweep gated before solving");
                return 1;
            }
            for (const auto& lvl : rep.levels)
                if (!lvl.solved) {
                    emit_error("solver", "level " + std::to_string(lvl.level) +
                                             " failed: " + lvl.error);
                    return 2;
                }
        } else if (hypcheck->parsed()) {
            const gapclock::ContinuousSpec spec = gapclock::load_continuous_spec(input);
            const gapclock::HypothesisReport rep = gapclock::hypothesis_check(spec);
            json out = gapclock::hypothesis_to_json(rep);
            out["f_reading"] = flags.f_reading;
            out["part3_selected"] =
                flags.f_reading == "atoms" ? rep.part3_atoms : rep.part3_literal;
            const std::string text = gapclock::dump17(out);
            if (output.empty())
                std::cout << text;
            else
                gapclock::save_text(output, text);
        }
    } catch (const IoError& e) {
        emit_error("io", e.what());
        return 3;
    } catch (const SolverFailure& e) {
        emit_error("solver", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        emit_error("validation", e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error("solver", e.what());
        return 2;
    }
    return 0;
}
