#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "chronograph/problem.hpp"

namespace chronograph {

/// End-of-edge propagators and the coupling matrix built from them.
struct Monodromy {
    Matrix E;  // diag(e^{a_j A_j})
    Matrix M;  // 1 - B E
    double rcond = 0.0;
};

struct EdgeSolution {
    std::size_t edge = 0;
    std::vector<double> times;   // 0 = t_0 < ... < t_K = a_j, uniform
    std::vector<Vector> states;  // psi_j(t_k)
    Vector c;                    // psi_j(0)
};

struct SolveReport {
    std::vector<EdgeSolution> solutions;
    /// ||psi_- - B psi_+ - g|| / (1 + ||g||)
    double boundary_residual = 0.0;
    /// max over edges and steps of the one-step recurrence defect relative to 1 + ||psi_k||
    double ode_residual = 0.0;
    /// |Re<psi', psi>_{L2} - (||psi_+||^2 - ||psi_-||^2) / 2| with psi' = A psi + f
    double energy_defect = 0.0;
    double monodromy_rcond = 0.0;
    bool ill_conditioned = false;
};

/// Monodromy rcond below which a solve still succeeds but is flagged.
inline constexpr double kIllConditionedRcond = 1e-8;

/// Per-edge ETD2 kernels for step h = a_j / steps_j:
/// exp_h = e^{hA}, h_phi1 = h phi_1(hA), h_phi2 = h phi_2(hA).
struct EdgeKernel {
    Matrix exp_h;
    Matrix h_phi1;
    Matrix h_phi2;
};

[[nodiscard]] EdgeKernel edge_kernel(const Matrix& a, double h);

[[nodiscard]] Monodromy assemble_monodromy(const TimeGraphProblem& problem);

/// F_j = int_0^{a_j} e^{(a_j - s) A_j} f_j(s) ds, exact for piecewise-linear f.
[[nodiscard]] Vector forced_terminal_integrals(const TimeGraphProblem& problem);

/// c = M^{-1}(g + B F): the initial values psi_- on every edge.
/// Throws NotWellPosed when M is numerically singular.
[[nodiscard]] Vector solve_boundary(const TimeGraphProblem& problem, const Monodromy& mono,
                                    const Vector& f_terminal);

/// Integrates every edge from its initial value c_j with the exact ETD2
/// recurrence and fills in the residual diagnostics.
[[nodiscard]] SolveReport propagate(const TimeGraphProblem& problem, const Vector& c);

[[nodiscard]] SolveReport solve(const TimeGraphProblem& problem);

/// Solves (D_t(B) - lambda) psi = f, i.e. the problem with A_j = lambda * 1.
[[nodiscard]] SolveReport resolvent_Dt(const TimeGraphProblem& problem, Complex lambda);

enum class SolutionGrade { Mild, Strong, Classical };
[[nodiscard]] std::string_view to_string(SolutionGrade g) noexcept;

/// Regularity grade of a computed solution. Sampled forcing counts as
/// W^{1,1} when every difference quotient is finite and at most
/// `quotient_bound`.
[[nodiscard]] SolutionGrade solution_grade(const TimeGraphProblem& problem, const SolveReport& report,
                                           double quotient_bound = 1e8);

[[nodiscard]] Vector minus_traces(const TimeGraph& graph, const SolveReport& report);
[[nodiscard]] Vector plus_traces(const TimeGraph& graph, const SolveReport& report);

/// Residual helpers shared with the oracle.
[[nodiscard]] double boundary_residual(const TimeGraphProblem& problem,
                                       const std::vector<EdgeSolution>& solutions);
[[nodiscard]] double energy_defect(const TimeGraphProblem& problem,
                                   const std::vector<EdgeSolution>& solutions);
/// Max ETD2 one-step defect of `solutions` measured with the given kernels.
[[nodiscard]] double etd2_defect(const TimeGraphProblem& problem,
                                 const std::vector<EdgeSolution>& solutions,
                                 const std::vector<EdgeKernel>& kernels);

/// Composite Simpson rule on uniform samples (3/8 rule closes odd counts).
[[nodiscard]] double composite_simpson(const std::vector<double>& values, double h);

}  // namespace chronograph
