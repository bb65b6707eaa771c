#pragma once

#include <string>
#include <vector>

#include "chronograph/solver.hpp"

namespace chronograph {

/// Schrodinger evolution d/dt psi_j - i H_j psi_j = f_j. `base.operators`
/// holds the Hermitian H_j, not the generators.
struct SchrodingerProblem {
    TimeGraphProblem base;
};

/// Throws NotHermitian naming the first offending edge.
void require_hermitian(const SchrodingerProblem& p);

/// The parabolic problem with A_j := i H_j.
[[nodiscard]] TimeGraphProblem schrodinger_generators(const SchrodingerProblem& p);

[[nodiscard]] SolveReport schrodinger_solve(const SchrodingerProblem& p);

struct UnitarityResult {
    bool unitary = false;
    /// ||B^2 - 2 B cos(a H)||
    double defect = 0.0;
    /// max over sampled t of ||S(t) S(t)* - 1||, S(t) = e^{itH}(1 - B e^{iaH})^{-1}
    double propagator_defect = 0.0;
    double commutator_norm = 0.0;
    std::vector<double> sample_times;
};

/// Commutator tolerance for B against e^{iaH}, relative to max(1, ||B||).
inline constexpr double kCommutatorTol = 1e-10;
inline constexpr double kUnitarityTol = 1e-10;

/// Throws NonCommuting when B and e^{iaH} do not commute and NotWellPosed
/// when 1 - B e^{iaH} is singular.
[[nodiscard]] UnitarityResult unitarity_check(const SchrodingerProblem& p, int samples = 9);

/// psi'' = A psi + f split as (d/dt - iS)(d/dt + iS), S = |A|^{1/2}.
struct SecondOrderProblem {
    TimeGraph graph;
    std::vector<Matrix> operators;  // Hermitian, invertible
    TransmissionOperator b1;        // outer stage, acts on psi
    TransmissionOperator b2;        // inner stage, acts on phi
    std::vector<Vector> g1;
    std::vector<Vector> g2;
    std::vector<ForcingTerm> forcing;
    std::vector<int> steps;
};

struct SecondOrderReport {
    SolveReport stage1;           // phi: d/dt phi + iS phi = f,   (B2, g2)
    SolveReport stage2;           // psi: d/dt psi - iS psi = phi, (B1, g1)
    std::vector<Matrix> roots;    // S_j = |A_j|^{1/2}
};

/// The two first-order problems, stage 2 forced by `phi` (stage-1 states).
[[nodiscard]] TimeGraphProblem second_order_stage1(const SecondOrderProblem& p, const std::vector<Matrix>& roots);
[[nodiscard]] TimeGraphProblem second_order_stage2(const SecondOrderProblem& p, const std::vector<Matrix>& roots,
                                                   const SolveReport& phi);

/// Throws ValidationError for non-Hermitian or singular A_j and
/// NotWellPosed with stage() = 1 or 2 for a singular stage monodromy.
[[nodiscard]] SecondOrderReport second_order_solve(const SecondOrderProblem& p);

struct MappingReport {
    bool real_applicable = false;
    double real_defect = 0.0;  // max |Im| over all states
    bool positivity_applicable = false;
    double positivity_defect = 0.0;  // max(0, -min Re) over all state entries
    double sup_norm = 0.0;           // max_k ||psi(t_k)||_inf
    double sup_bound = 0.0;          // C (||g||_inf + ||f||_inf)
    double sup_constant = 0.0;       // C
    double sup_bound_defect = 0.0;   // max(0, sup_norm - sup_bound)
    double sup_ratio = 0.0;          // sup_norm / sup_bound, 0 when the bound vanishes
    std::vector<std::string> unmet;  // hypotheses that failed
};

/// Entry threshold for the nonnegativity checks on B, A and M^{-1}.
inline constexpr double kNonnegativeTol = -1e-12;

/// Computes every defect regardless of hypotheses; `unmet` lists those that
/// do not hold so callers know which defects carry no guarantee.
[[nodiscard]] MappingReport verify_mapping_properties(const SolveReport& report, const TimeGraphProblem& problem);

/// Throws HypothesesNotMet when report.unmet is nonempty.
void require_mapping_hypotheses(const MappingReport& report);

}  // namespace chronograph
