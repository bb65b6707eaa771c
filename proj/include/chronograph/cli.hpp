#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "chronograph/oracle.hpp"
#include "chronograph/problem_io.hpp"
#include "chronograph/scenarios.hpp"

namespace chronograph {

/// The complete exit-code contract of the command line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitInvalid = 1,        // parse, validation or I/O failure
    kExitNotWellPosed = 2,   // singular monodromy
    kExitToleranceBreach = 3 // compare discrepancies above tolerance
};

/// Generator problem actually solved: the file's problem, or A_j = i H_j in
/// Schrodinger mode.
[[nodiscard]] TimeGraphProblem generator_problem(const ProblemDocument& doc);

/// One row per grid node: edge_id, t, re_0..re_{D-1}, im_0..im_{D-1} with D
/// the largest edge dimension; smaller edges leave trailing cells empty.
[[nodiscard]] std::string solution_csv(const TimeGraph& graph, const SolveReport& report);

[[nodiscard]] nlohmann::json classification_json(const ProblemDocument& doc);
[[nodiscard]] nlohmann::json solve_report_json(const ProblemDocument& doc, const SolveReport& report);
[[nodiscard]] nlohmann::json comparison_json(const OracleComparison& cmp, const OracleConfig& cfg, double tol,
                                             bool pass);

/// Whether a comparison is within `tol` (state and boundary) and, when
/// Picard converged, within 10 picard_tol of the direct boundary vector.
[[nodiscard]] bool comparison_passes(const OracleComparison& cmp, const OracleConfig& cfg, double tol);

int run_solve(const std::filesystem::path& file, const std::filesystem::path& out_dir, std::ostream& err);
int run_solve_document(const ProblemDocument& doc, const std::filesystem::path& out_dir, std::ostream& err);
/// Writes problem.json for the preset next to the solve outputs.
int run_scenario(ScenarioId id, const std::vector<std::string>& overrides, const std::filesystem::path& out_dir,
                 std::ostream& err);
int run_compare(const std::filesystem::path& file, const OracleConfig& cfg, double tol,
                const std::filesystem::path& out_dir, std::ostream& err);
int run_classify(const std::filesystem::path& file, std::ostream& out, std::ostream& err);

}  // namespace chronograph
