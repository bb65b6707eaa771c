#include "chronograph/cli.hpp"

#include <cstdio>
#include <ostream>

#include "chronograph/variants.hpp"

namespace chronograph {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string format17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

json edge_ids(const TimeGraph& graph, const std::vector<std::size_t>& idx) {
    json out = json::array();
    for (auto i : idx) out.push_back(graph.edge(i).id);
    return out;
}

double pattern_tol(const ProblemDocument& doc) {
    const auto it = doc.options.find("pattern_tol");
    if (it == doc.options.end()) return 0.0;
    if (!it->is_number() || it->get<double>() < 0.0) throw ParseError("options.pattern_tol: expected a nonnegative number");
    return it->get<double>();
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const ValidationError& e) {
        err << "validation failed:\n";
        for (const auto& v : e.violations()) err << "  " << v.field << ": " << v.constraint << "\n";
        return kExitInvalid;
    } catch (const NotWellPosed& e) {
        err << "not well-posed: " << e.what() << " (rcond " << e.rcond() << ")\n";
        return kExitNotWellPosed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}

void ensure_dir(const fs::path& dir) {
    if (!dir.empty()) fs::create_directories(dir);
}

}  // namespace

TimeGraphProblem generator_problem(const ProblemDocument& doc) {
    if (doc.mode == ProblemMode::Schrodinger) return schrodinger_generators({doc.problem});
    return doc.problem;
}

std::string solution_csv(const TimeGraph& graph, const SolveReport& report) {
    int width = 0;
    for (std::size_t j = 0; j < graph.edge_count(); ++j) width = std::max(width, graph.dim(j));
    std::string out = "edge_id,t";
    for (int i = 0; i < width; ++i) out += ",re_" + std::to_string(i);
    for (int i = 0; i < width; ++i) out += ",im_" + std::to_string(i);
    out += "\n";
    for (const auto& sol : report.solutions) {
        const std::string id = csv_field(graph.edge(sol.edge).id);
        for (std::size_t k = 0; k < sol.states.size(); ++k) {
            const Vector& s = sol.states[k];
            out += id + "," + format17(sol.times[k]);
            for (int i = 0; i < width; ++i) out += "," + (i < s.size() ? format17(s(i).real()) : std::string());
            for (int i = 0; i < width; ++i) out += "," + (i < s.size() ? format17(s(i).imag()) : std::string());
            out += "\n";
        }
    }
    return out;
}

json classification_json(const ProblemDocument& doc) {
    const TimeGraph& graph = doc.problem.graph;
    const BlockPattern pattern = pattern_of(doc.problem.transmission, graph.edge_count(), pattern_tol(doc));
    const SolvabilityReport r = classify_solvability(pattern);
    json out = {{"class", std::string(to_string(r.cls))}};
    out["ordering"] = r.ordering ? edge_ids(graph, *r.ordering) : json(nullptr);
    out["blocking_cycle"] = r.blocking_cycle ? edge_ids(graph, *r.blocking_cycle) : json(nullptr);
    return out;
}

json solve_report_json(const ProblemDocument& doc, const SolveReport& report) {
    const TimeGraphProblem gen = generator_problem(doc);
    const HypothesisReport h = diagnose(gen);
    json margins = json::object();
    for (std::size_t j = 0; j < gen.edge_count(); ++j) margins[gen.graph.edge(j).id] = h.dissipativity_margin[j];
    json out = {
        {"status", "ok"},
        {"mode", doc.mode == ProblemMode::Schrodinger ? "schrodinger" : "parabolic"},
        {"boundary_residual", report.boundary_residual},
        {"ode_residual", report.ode_residual},
        {"energy_defect", report.energy_defect},
        {"monodromy_rcond", report.monodromy_rcond},
        {"ill_conditioned", report.ill_conditioned},
        {"solvability", classification_json(doc)},
        {"hypotheses",
         {{"dissipativity_margin", margins},
          {"b_norm", h.b_norm},
          {"monodromy_rcond", h.monodromy_rcond},
          {"epsilon", h.epsilon},
          {"sufficient_condition_met", h.sufficient_condition_met},
          {"commutator_norm", h.commutator_norm}}},
        {"solution_grade", std::string(to_string(solution_grade(gen, report)))},
    };
    if (doc.mode == ProblemMode::Schrodinger) {
        try {
            const UnitarityResult u = unitarity_check({doc.problem});
            out["unitarity"] = {{"unitary", u.unitary},
                                {"defect", u.defect},
                                {"propagator_defect", u.propagator_defect},
                                {"commutator_norm", u.commutator_norm}};
        } catch (const NonCommuting& e) {
            out["unitarity"] = {{"applicable", false}, {"commutator_norm", e.commutator_norm()}};
        }
    }
    if (!doc.scenario.is_null()) out["scenario"] = doc.scenario;
    return out;
}

bool comparison_passes(const OracleComparison& cmp, const OracleConfig& cfg, double tol) {
    if (!(cmp.max_state_discrepancy <= tol) || !(cmp.boundary_discrepancy <= tol)) return false;
    if (cmp.picard.converged) {
        const double scale = std::max(1.0, cmp.picard.c.norm());
        if (!(cmp.picard_discrepancy <= 10.0 * cfg.picard_tol * scale)) return false;
    }
    return true;
}

json comparison_json(const OracleComparison& cmp, const OracleConfig& cfg, double tol, bool pass) {
    json out = {
        {"max_state_discrepancy", cmp.max_state_discrepancy},
        {"boundary_discrepancy", cmp.boundary_discrepancy},
        {"order_steps", cmp.order_steps},
        {"order_errors", cmp.order_errors},
        {"observed_order", cmp.observed_order ? json(*cmp.observed_order) : json(nullptr)},
        {"picard",
         {{"converged", cmp.picard.converged},
          {"status", cmp.picard.converged ? "converged"
                     : cmp.picard.spectral_radius >= 1.0 - kNeutralRadiusTol ? "divergence"
                                                         : "max_iter"},
          {"iterations", cmp.picard.iterations},
          {"spectral_radius", cmp.picard.spectral_radius},
          {"discrepancy", cmp.picard.converged ? json(cmp.picard_discrepancy) : json(nullptr)}}},
        {"cn_steps_per_edge", cfg.cn_steps_per_edge},
        {"picard_tol", cfg.picard_tol},
        {"tolerance", tol},
        {"pass", pass},
    };
    return out;
}

int run_solve_document(const ProblemDocument& doc, const fs::path& out_dir, std::ostream& err) {
    return guarded(err, [&] {
        ensure_dir(out_dir);
        const TimeGraphProblem gen = generator_problem(doc);
        SolveReport report;
        try {
            report = solve(gen);
        } catch (const NotWellPosed& e) {
            json failed = {{"status", "not_well_posed"},
                           {"message", e.what()},
                           {"monodromy_rcond", e.rcond()},
                           {"solvability", classification_json(doc)}};
            if (!doc.scenario.is_null()) failed["scenario"] = doc.scenario;
            write_file_atomic(out_dir / "report.json", canonical_text(failed));
            throw;
        }
        write_file_atomic(out_dir / "solution.csv", solution_csv(gen.graph, report));
        write_file_atomic(out_dir / "report.json", canonical_text(solve_report_json(doc, report)));
        if (report.ill_conditioned)
            err << "warning: monodromy is ill-conditioned (rcond " << report.monodromy_rcond << ")\n";
        return static_cast<int>(kExitOk);
    });
}

int run_solve(const fs::path& file, const fs::path& out_dir, std::ostream& err) {
    ProblemDocument doc;
    const int parsed = guarded(err, [&] {
        doc = load_problem(file);
        return static_cast<int>(kExitOk);
    });
    if (parsed != kExitOk) return parsed;
    return run_solve_document(doc, out_dir, err);
}

int run_scenario(ScenarioId id, const std::vector<std::string>& overrides, const fs::path& out_dir,
                 std::ostream& err) {
    ProblemDocument doc;
    const int built = guarded(err, [&] {
        doc = make_scenario(id, parse_overrides(overrides));
        ensure_dir(out_dir);
        write_file_atomic(out_dir / "problem.json", canonical_text(to_json(doc)));
        return static_cast<int>(kExitOk);
    });
    if (built != kExitOk) return built;
    return run_solve_document(doc, out_dir, err);
}

int run_compare(const fs::path& file, const OracleConfig& cfg, double tol, const fs::path& out_dir,
                std::ostream& err) {
    return guarded(err, [&] {
        if (cfg.cn_steps_per_edge < 1 || cfg.picard_max_iter < 1 || !(cfg.picard_tol > 0.0) || !(tol > 0.0))
            throw ParseError("compare: oracle settings and tolerance must be positive");
        const ProblemDocument doc = load_problem(file);
        const OracleComparison cmp = compare_with_oracles(generator_problem(doc), cfg);
        const bool pass = comparison_passes(cmp, cfg, tol);
        ensure_dir(out_dir);
        write_file_atomic(out_dir / "compare.json", canonical_text(comparison_json(cmp, cfg, tol, pass)));
        if (!pass) {
            err << "compare: discrepancy above tolerance (state " << cmp.max_state_discrepancy << ", boundary "
                << cmp.boundary_discrepancy << ", tol " << tol << ")\n";
            return static_cast<int>(kExitToleranceBreach);
        }
        return static_cast<int>(kExitOk);
    });
}

int run_classify(const fs::path& file, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        out << canonical_text(classification_json(load_problem(file)));
        return static_cast<int>(kExitOk);
    });
}

}  // namespace chronograph
