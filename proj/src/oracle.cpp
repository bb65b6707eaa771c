#include "chronograph/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chronograph/parallel.hpp"

namespace chronograph {

Vector sample_on_grid(const EdgeSolution& fine, std::size_t k, std::size_t coarse_steps) {
    const std::size_t fine_steps = fine.states.size() - 1;
    const std::size_t scaled = k * fine_steps;
    const std::size_t q = scaled / coarse_steps;
    const std::size_t r = scaled % coarse_steps;
    if (r == 0) return fine.states[q];
    const double w = static_cast<double>(r) / static_cast<double>(coarse_steps);
    return fine.states[q] + w * (fine.states[q + 1] - fine.states[q]);
}

namespace {

struct CnEdge {
    Eigen::PartialPivLU<Matrix> lhs;  // I - h/2 A
    Matrix rhs;                       // I + h/2 A
    Matrix step;                      // (I - h/2 A)^{-1} (I + h/2 A)
    double h = 0.0;
};

CnEdge make_cn_edge(const Matrix& a, double h) {
    const Matrix id = Matrix::Identity(a.rows(), a.cols());
    CnEdge e;
    e.h = h;
    e.lhs.compute(id - 0.5 * h * a);
    e.rhs = id + 0.5 * h * a;
    e.step = e.lhs.solve(e.rhs);
    return e;
}

Matrix matrix_power(Matrix base, long n) {
    Matrix result = Matrix::Identity(base.rows(), base.cols());
    while (n > 0) {
        if (n & 1) result = result * base;
        base = base * base;
        n >>= 1;
    }
    return result;
}

Vector cn_step(const CnEdge& e, const Vector& u, const Vector& f0, const Vector& f1) {
    return e.lhs.solve(e.rhs * u + 0.5 * e.h * (f0 + f1));
}

}  // namespace

SolveReport cn_solve(const TimeGraphProblem& problem, const OracleConfig& cfg) {
    require_valid(problem);
    if (cfg.cn_steps_per_edge < 1) throw std::invalid_argument("cn_solve: cn_steps_per_edge must be positive");
    const std::size_t n = problem.edge_count();
    const auto steps = static_cast<std::size_t>(cfg.cn_steps_per_edge);

    std::vector<CnEdge> edges(n);
    std::vector<Matrix> monodromy_blocks(n);
    std::vector<Vector> forced(n);
    parallel_for(n, [&](std::size_t j) {
        edges[j] = make_cn_edge(problem.operators[j], problem.graph.length(j) / static_cast<double>(steps));
        monodromy_blocks[j] = matrix_power(edges[j].step, static_cast<long>(steps));
        Vector u = Vector::Zero(problem.graph.dim(j));
        Vector f0 = forcing_on_grid(problem, j, 0, steps);
        for (std::size_t m = 0; m < steps; ++m) {
            Vector f1 = forcing_on_grid(problem, j, m + 1, steps);
            u = cn_step(edges[j], u, f0, f1);
            f0 = std::move(f1);
        }
        forced[j] = std::move(u);
    });

    const Matrix b = dense_transmission(problem);
    const Matrix be = b * block_diagonal(monodromy_blocks);
    const Matrix m = Matrix::Identity(b.rows(), b.cols()) - be;
    const Vector rhs = g_vector(problem) + b * assemble_k_vector(problem.graph, forced);
    const double rc = monodromy_rcond(m, be);
    if (!(rc >= kSingularRcond)) throw NotWellPosed("Crank-Nicolson monodromy is singular", rc);
    Vector c;
    try {
        c = solve_linear(m, rhs).x.col(0);
    } catch (const SingularMatrix& e) {
        throw NotWellPosed("Crank-Nicolson monodromy is singular", e.rcond());
    }

    const auto initial = split_k_vector(problem.graph, c);
    SolveReport report;
    report.monodromy_rcond = rc;
    report.ill_conditioned = rc < kIllConditionedRcond;
    report.solutions.resize(n);
    std::vector<double> defects(n, 0.0);
    parallel_for(n, [&](std::size_t j) {
        EdgeSolution& sol = report.solutions[j];
        const CnEdge& e = edges[j];
        sol.edge = j;
        sol.c = initial[j];
        sol.times.resize(steps + 1);
        sol.states.resize(steps + 1);
        sol.states[0] = initial[j];
        for (std::size_t k = 0; k <= steps; ++k) sol.times[k] = static_cast<double>(k) * e.h;
        sol.times.back() = problem.graph.length(j);
        Vector f0 = forcing_on_grid(problem, j, 0, steps);
        for (std::size_t k = 0; k < steps; ++k) {
            Vector f1 = forcing_on_grid(problem, j, k + 1, steps);
            sol.states[k + 1] = cn_step(e, sol.states[k], f0, f1);
            const Vector lhs = sol.states[k + 1] - 0.5 * e.h * (problem.operators[j] * sol.states[k + 1]);
            const Vector defect = lhs - e.rhs * sol.states[k] - 0.5 * e.h * (f0 + f1);
            defects[j] = std::max(defects[j], defect.norm() / (1.0 + sol.states[k].norm()));
            f0 = std::move(f1);
        }
    });
    report.boundary_residual = boundary_residual(problem, report.solutions);
    report.ode_residual = *std::max_element(defects.begin(), defects.end());

    report.energy_defect = energy_defect(problem, report.solutions);
    return report;
}

PicardResult picard_boundary(const TimeGraphProblem& problem, const OracleConfig& cfg) {
    const Monodromy mono = assemble_monodromy(problem);
    const Vector f_terminal = forced_terminal_integrals(problem);
    const Matrix b = dense_transmission(problem);
    const Matrix be = b * mono.E;
    const Vector shift = b * f_terminal + g_vector(problem);

    PicardResult result;
    result.spectral_radius = spectral_radius(be);
    result.c = Vector::Zero(shift.size());
    // Neutral loops come out at rho = 1 - O(eps); treat them as divergent.
    if (!(result.spectral_radius < 1.0 - kNeutralRadiusTol)) return result;

    // Stop once the step is small relative to the contraction margin, so the
    // remaining error stays within picard_tol.
    const double margin = 1.0 - result.spectral_radius;
    for (int it = 1; it <= cfg.picard_max_iter; ++it) {
        Vector next = be * result.c + shift;
        const double step = (next - result.c).norm();
        result.c = std::move(next);
        result.iterations = it;
        if (!result.c.allFinite()) return result;
        if (step <= cfg.picard_tol * margin * std::max(1.0, result.c.norm())) {
            // The previous iterate was already a fixed point to tolerance.
            result.iterations = it - 1;
            result.converged = true;
            break;
        }
    }
    return result;
}

std::optional<std::vector<std::size_t>> brute_force_triangularizable(const BlockPattern& pattern) {
    if (pattern.n > 8) throw TooLarge("brute_force_triangularizable: more than 8 edges");
    std::vector<std::size_t> order(pattern.n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::size_t> position(pattern.n);
    do {
        for (std::size_t k = 0; k < order.size(); ++k) position[order[k]] = k;
        // B_ij = 0 whenever edge j comes after edge i.
        const bool lower = std::all_of(pattern.nonzero.begin(), pattern.nonzero.end(), [&](const auto& ij) {
            return ij.first < pattern.n && ij.second < pattern.n && position[ij.second] <= position[ij.first];
        });
        if (lower) return order;
    } while (std::next_permutation(order.begin(), order.end()));
    return std::nullopt;
}

double fit_order(const std::vector<int>& steps, const std::vector<double>& errors) {
    const std::size_t n = std::min(steps.size(), errors.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(static_cast<double>(steps[i]));
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double dn = static_cast<double>(n);
    return -(dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

namespace {

double trace_error(const SolveReport& a, const SolveReport& b) {
    double worst = 0.0;
    for (std::size_t j = 0; j < a.solutions.size(); ++j) {
        worst = std::max(worst, (a.solutions[j].states.front() - b.solutions[j].states.front()).norm());
        worst = std::max(worst, (a.solutions[j].states.back() - b.solutions[j].states.back()).norm());
    }
    return worst;
}

constexpr double kExactTraceError = 1e-11;

}  // namespace

OracleComparison compare_with_oracles(const TimeGraphProblem& problem, const OracleConfig& cfg) {
    OracleComparison out;
    const SolveReport direct = solve(problem);
    const SolveReport cn = cn_solve(problem, cfg);

    for (std::size_t j = 0; j < problem.edge_count(); ++j) {
        const auto& sol = direct.solutions[j];
        const std::size_t steps = sol.states.size() - 1;
        for (std::size_t k = 0; k <= steps; ++k) {
            const double d = (sol.states[k] - sample_on_grid(cn.solutions[j], k, steps)).norm();
            out.max_state_discrepancy = std::max(out.max_state_discrepancy, d);
        }
        out.boundary_discrepancy = std::max(out.boundary_discrepancy, (sol.c - cn.solutions[j].c).norm());
    }

    // Three refinements below the main CN resolution.
    for (int divisor : {80, 40, 20, 10}) {
        OracleConfig level = cfg;
        level.cn_steps_per_edge = std::max(4, cfg.cn_steps_per_edge / divisor);
        out.order_steps.push_back(level.cn_steps_per_edge);
        out.order_errors.push_back(trace_error(direct, cn_solve(problem, level)));
    }
    const bool exact = std::all_of(out.order_errors.begin(), out.order_errors.end(),
                                   [](double e) { return e < kExactTraceError; });
    if (!exact) out.observed_order = fit_order(out.order_steps, out.order_errors);

    out.picard = picard_boundary(problem, cfg);
    if (out.picard.converged) {
        std::vector<Vector> c;
        for (const auto& s : direct.solutions) c.push_back(s.c);
        out.picard_discrepancy = (out.picard.c - assemble_k_vector(problem.graph, c)).norm();
    }
    return out;
}

}  // namespace chronograph
