#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "chronograph/solver.hpp"

namespace chronograph {

/// Independent reference solvers. None of them call expm for propagation.
struct OracleConfig {
    int cn_steps_per_edge = 10000;
    int picard_max_iter = 100000;
    double picard_tol = 1e-12;
};

/// Crank-Nicolson on every edge with trapezoidal forcing, coupled through the
/// CN monodromy (1 - B P^N) c = g + B F_cn. Second order in the CN step.
/// Throws NotWellPosed when the CN monodromy is singular.
[[nodiscard]] SolveReport cn_solve(const TimeGraphProblem& problem, const OracleConfig& cfg = {});

struct PicardResult {
    bool converged = false;
    Vector c;
    int iterations = 0;  // iterates needed to reach the fixed point
    double spectral_radius = 0.0;  // rho(B E)
};

/// rho(B E) within this of 1 counts as non-contractive.
inline constexpr double kNeutralRadiusTol = 1e-12;

/// Fixed-point iteration c <- B(E c + F) + g from c = 0. Reports divergence
/// without iterating when rho(B E) >= 1 - kNeutralRadiusTol.
[[nodiscard]] PicardResult picard_boundary(const TimeGraphProblem& problem, const OracleConfig& cfg = {});

/// Exhaustive search for an edge order making the pattern block
/// lower-triangular. Throws TooLarge for more than 8 edges.
[[nodiscard]] std::optional<std::vector<std::size_t>> brute_force_triangularizable(const BlockPattern& pattern);

/// State of `fine` at node k of a `coarse_steps`-interval grid, linear
/// between fine nodes when the grids do not nest.
[[nodiscard]] Vector sample_on_grid(const EdgeSolution& fine, std::size_t k, std::size_t coarse_steps);

struct OracleComparison {
    double max_state_discrepancy = 0.0;     // solver vs CN at solver nodes
    double boundary_discrepancy = 0.0;      // |c_cn - c_solver|
    std::vector<int> order_steps;           // CN step counts used for the order fit
    std::vector<double> order_errors;       // trace errors at those counts
    std::optional<double> observed_order;   // empty when CN is exact to roundoff
    PicardResult picard;
    double picard_discrepancy = 0.0;        // |c_picard - c_solver| when converged
};

/// Runs the direct solver, CN at cfg.cn_steps_per_edge and at four coarser
/// levels (for the order estimate), and the Picard iteration.
[[nodiscard]] OracleComparison compare_with_oracles(const TimeGraphProblem& problem, const OracleConfig& cfg = {});

/// Least-squares slope of -log(error) against log(steps).
[[nodiscard]] double fit_order(const std::vector<int>& steps, const std::vector<double>& errors);

}  // namespace chronograph
