#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chronograph/cli.hpp"

int main(int argc, char** argv) {
    using namespace chronograph;

    CLI::App app{"Solver and structural analyzer for evolution equations on time-graphs"};
    app.require_subcommand(1);

    std::string file, out_dir = ".";
    auto* solve = app.add_subcommand("solve", "solve a problem file, writing solution.csv and report.json");
    solve->add_option("file", file, "problem JSON")->required();
    solve->add_option("--out", out_dir, "output directory");

    std::string scenario_name;
    std::vector<std::string> overrides;
    auto* scenario = app.add_subcommand("scenario", "materialize a preset and solve it");
    scenario->add_option("id", scenario_name, "preset name")->required();
    scenario->add_option("--set", overrides, "override key=value (steps, length, alpha, d, n, variant)");
    scenario->add_option("--out", out_dir, "output directory");

    OracleConfig cfg;
    double tol = 1e-6;
    auto* compare = app.add_subcommand("compare", "compare the solver with the Crank-Nicolson and Picard oracles");
    compare->add_option("file", file, "problem JSON")->required();
    compare->add_option("--cn-steps", cfg.cn_steps_per_edge, "Crank-Nicolson steps per edge");
    compare->add_option("--tol", tol, "maximum allowed discrepancy");
    compare->add_option("--out", out_dir, "output directory");

    auto* classify = app.add_subcommand("classify", "report the iterative-solvability class");
    classify->add_option("file", file, "problem JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    if (*solve) return run_solve(file, out_dir, std::cerr);
    if (*scenario) {
        const auto id = scenario_from_string(scenario_name);
        if (!id) {
            std::cerr << "unknown scenario \"" << scenario_name << "\"; known:";
            for (auto s : all_scenarios()) std::cerr << " " << to_string(s);
            std::cerr << "\n";
            return kExitInvalid;
        }
        return run_scenario(*id, overrides, out_dir, std::cerr);
    }
    if (*compare) return run_compare(file, cfg, tol, out_dir, std::cerr);
    if (*classify) return run_classify(file, std::cout, std::cerr);
    return kExitInvalid;
}
