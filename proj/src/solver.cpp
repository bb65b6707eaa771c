#include "chronograph/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chronograph/parallel.hpp"

namespace chronograph {

EdgeKernel edge_kernel(const Matrix& a, double h) {
    PhiBundle phi = phi_functions(a, h);
    return {std::move(phi.exp), h * phi.phi1, h * phi.phi2};
}

namespace {

std::vector<EdgeKernel> compute_kernels(const TimeGraphProblem& p) {
    std::vector<EdgeKernel> kernels(p.edge_count());
    parallel_for(p.edge_count(), [&](std::size_t j) {
        kernels[j] = edge_kernel(p.operators[j], p.step_size(j));
    });
    return kernels;
}

bool is_zero(const ForcingTerm& f) { return std::holds_alternative<ZeroForcing>(f); }
bool is_constant(const ForcingTerm& f) { return std::holds_alternative<ConstantForcing>(f); }

// One ETD2 step: e^{hA} u + h phi1 f_k + h phi2 (f_{k+1} - f_k).
Vector etd2_step(const EdgeKernel& k, const Vector& u, const ForcingTerm& f, std::size_t step, int dim) {
    Vector next = k.exp_h * u;
    if (is_zero(f)) return next;
    const Vector fk = forcing_at(f, step, dim);
    next += k.h_phi1 * fk;
    if (!is_constant(f)) next += k.h_phi2 * (forcing_at(f, step + 1, dim) - fk);
    return next;
}

Vector terminal_integral(const TimeGraphProblem& p, std::size_t j, const EdgeKernel& k) {
    const int dim = p.graph.dim(j);
    Vector u = Vector::Zero(dim);
    if (is_zero(p.forcing[j])) return u;
    for (int s = 0; s < p.steps[j]; ++s) u = etd2_step(k, u, p.forcing[j], static_cast<std::size_t>(s), dim);
    return u;
}

Vector forced_terminal_integrals(const TimeGraphProblem& p, const std::vector<EdgeKernel>& kernels) {
    std::vector<Vector> per_edge(p.edge_count());
    parallel_for(p.edge_count(), [&](std::size_t j) { per_edge[j] = terminal_integral(p, j, kernels[j]); });
    return assemble_k_vector(p.graph, per_edge);
}

SolveReport propagate(const TimeGraphProblem& p, const Vector& c, const std::vector<EdgeKernel>& kernels) {
    if (c.size() != static_cast<Eigen::Index>(p.graph.total_dim()))
        throw DimensionError("propagate: c has wrong length");
    const auto initial = split_k_vector(p.graph, c);

    SolveReport report;
    report.solutions.resize(p.edge_count());
    parallel_for(p.edge_count(), [&](std::size_t j) {
        const int dim = p.graph.dim(j);
        const int steps = p.steps[j];
        const double h = p.step_size(j);
        EdgeSolution& sol = report.solutions[j];
        sol.edge = j;
        sol.c = initial[j];
        sol.times.resize(static_cast<std::size_t>(steps) + 1);
        sol.states.resize(static_cast<std::size_t>(steps) + 1);
        sol.states[0] = initial[j];
        for (int s = 0; s <= steps; ++s) sol.times[static_cast<std::size_t>(s)] = s * h;
        sol.times.back() = p.graph.length(j);
        for (int s = 0; s < steps; ++s) {
            const auto k = static_cast<std::size_t>(s);
            sol.states[k + 1] = etd2_step(kernels[j], sol.states[k], p.forcing[j], k, dim);
        }
    });

    // Defect against kernels whose exponential is rebuilt as (e^{hA/2})^2.
    std::vector<EdgeKernel> check(kernels);
    for (std::size_t j = 0; j < p.edge_count(); ++j) {
        const Matrix half = expm(p.operators[j], p.step_size(j) / 2.0);
        check[j].exp_h = half * half;
    }

    report.boundary_residual = boundary_residual(p, report.solutions);
    report.ode_residual = etd2_defect(p, report.solutions, check);
    report.energy_defect = energy_defect(p, report.solutions);
    return report;
}

}  // namespace

Monodromy assemble_monodromy(const TimeGraphProblem& problem) {
    require_valid(problem);
    std::vector<Matrix> blocks(problem.edge_count());
    parallel_for(problem.edge_count(), [&](std::size_t j) {
        blocks[j] = expm(problem.operators[j], problem.graph.length(j));
    });
    Monodromy mono;
    mono.E = block_diagonal(blocks);
    const Matrix b = dense_transmission(problem);
    const Matrix be = b * mono.E;
    mono.M = Matrix::Identity(b.rows(), b.cols()) - be;
    mono.rcond = monodromy_rcond(mono.M, be);
    return mono;
}

Vector forced_terminal_integrals(const TimeGraphProblem& problem) {
    require_valid(problem);
    return forced_terminal_integrals(problem, compute_kernels(problem));
}

Vector solve_boundary(const TimeGraphProblem& problem, const Monodromy& mono, const Vector& f_terminal) {
    if (!(mono.rcond >= kSingularRcond))
        throw NotWellPosed("monodromy 1 - B e^{aA} is singular", mono.rcond);
    const Matrix b = dense_transmission(problem);
    const Vector rhs = g_vector(problem) + b * f_terminal;
    try {
        return solve_linear(mono.M, rhs).x.col(0);
    } catch (const SingularMatrix& e) {
        throw NotWellPosed("monodromy 1 - B e^{aA} is singular", e.rcond());
    }
}

SolveReport propagate(const TimeGraphProblem& problem, const Vector& c) {
    require_valid(problem);
    return propagate(problem, c, compute_kernels(problem));
}

SolveReport solve(const TimeGraphProblem& problem) {
    const Monodromy mono = assemble_monodromy(problem);
    const auto kernels = compute_kernels(problem);
    const Vector f_terminal = forced_terminal_integrals(problem, kernels);
    const Vector c = solve_boundary(problem, mono, f_terminal);
    SolveReport report = propagate(problem, c, kernels);
    report.monodromy_rcond = mono.rcond;
    report.ill_conditioned = mono.rcond < kIllConditionedRcond;
    return report;
}

SolveReport resolvent_Dt(const TimeGraphProblem& problem, Complex lambda) {
    TimeGraphProblem shifted = problem;
    for (std::size_t j = 0; j < shifted.operators.size() && j < shifted.edge_count(); ++j) {
        const int d = shifted.graph.dim(j);
        shifted.operators[j] = lambda * Matrix::Identity(d, d);
    }
    return solve(shifted);
}

std::string_view to_string(SolutionGrade g) noexcept {
    switch (g) {
        case SolutionGrade::Mild: return "MILD";
        case SolutionGrade::Strong: return "STRONG";
        case SolutionGrade::Classical: return "CLASSICAL";
    }
    return "UNKNOWN";
}

SolutionGrade solution_grade(const TimeGraphProblem& problem, const SolveReport& report,
                             double quotient_bound) {
    const bool finite = std::isfinite(report.boundary_residual) && std::isfinite(report.ode_residual) &&
                        std::isfinite(report.energy_defect);
    if (!finite) return SolutionGrade::Mild;

    for (std::size_t j = 0; j < problem.edge_count(); ++j) {
        const auto* sampled = std::get_if<SampledForcing>(&problem.forcing[j]);
        if (sampled == nullptr) continue;
        const double h = problem.step_size(j);
        for (std::size_t k = 0; k + 1 < sampled->values.size(); ++k) {
            const double q = (sampled->values[k + 1] - sampled->values[k]).norm() / h;
            if (!std::isfinite(q) || q > quotient_bound) return SolutionGrade::Strong;
        }
    }
    return SolutionGrade::Classical;
}

Vector minus_traces(const TimeGraph& graph, const SolveReport& report) {
    std::vector<Vector> per_edge;
    for (const auto& s : report.solutions) per_edge.push_back(s.states.front());
    return assemble_k_vector(graph, per_edge);
}

Vector plus_traces(const TimeGraph& graph, const SolveReport& report) {
    std::vector<Vector> per_edge;
    for (const auto& s : report.solutions) per_edge.push_back(s.states.back());
    return assemble_k_vector(graph, per_edge);
}

double boundary_residual(const TimeGraphProblem& problem, const std::vector<EdgeSolution>& solutions) {
    std::vector<Vector> minus, plus;
    for (const auto& s : solutions) {
        minus.push_back(s.states.front());
        plus.push_back(s.states.back());
    }
    const Vector g = g_vector(problem);
    const Vector r = assemble_k_vector(problem.graph, minus) -
                     dense_transmission(problem) * assemble_k_vector(problem.graph, plus) - g;
    return r.norm() / (1.0 + g.norm());
}

double composite_simpson(const std::vector<double>& v, double h) {
    const std::size_t intervals = v.size() < 2 ? 0 : v.size() - 1;
    if (intervals == 0) return 0.0;
    if (intervals == 1) return h * (v[0] + v[1]) / 2.0;

    double total = 0.0;
    std::size_t simpson_end = intervals;
    if (intervals % 2 == 1) {
        // Simpson 3/8 on the last three intervals.
        simpson_end = intervals - 3;
        const std::size_t s = simpson_end;
        total += 3.0 * h / 8.0 * (v[s] + 3.0 * v[s + 1] + 3.0 * v[s + 2] + v[s + 3]);
    }
    for (std::size_t k = 0; k + 2 <= simpson_end; k += 2)
        total += h / 3.0 * (v[k] + 4.0 * v[k + 1] + v[k + 2]);
    return total;
}

double energy_defect(const TimeGraphProblem& problem, const std::vector<EdgeSolution>& solutions) {
    double integral = 0.0;
    double boundary = 0.0;
    for (const auto& sol : solutions) {
        const std::size_t j = sol.edge;
        const Matrix& a = problem.operators[j];
        const std::size_t intervals = sol.states.size() - 1;
        std::vector<double> samples(sol.states.size());
        for (std::size_t k = 0; k < sol.states.size(); ++k) {
            const Vector derivative = a * sol.states[k] + forcing_on_grid(problem, j, k, intervals);
            samples[k] = sol.states[k].dot(derivative).real();
        }
        const double h = problem.graph.length(j) / static_cast<double>(sol.states.size() - 1);
        integral += composite_simpson(samples, h);
        boundary += 0.5 * (sol.states.back().squaredNorm() - sol.states.front().squaredNorm());
    }
    return std::abs(integral - boundary);
}

double etd2_defect(const TimeGraphProblem& problem, const std::vector<EdgeSolution>& solutions,
                   const std::vector<EdgeKernel>& kernels) {
    double worst = 0.0;
    for (const auto& sol : solutions) {
        const std::size_t j = sol.edge;
        const int dim = problem.graph.dim(j);
        for (std::size_t k = 0; k + 1 < sol.states.size(); ++k) {
            const Vector predicted = etd2_step(kernels[j], sol.states[k], problem.forcing[j], k, dim);
            const double d = (sol.states[k + 1] - predicted).norm() / (1.0 + sol.states[k].norm());
            worst = std::max(worst, d);
        }
    }
    return worst;
}

}  // namespace chronograph
