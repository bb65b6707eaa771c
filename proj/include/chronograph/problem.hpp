#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "chronograph/errors.hpp"
#include "chronograph/graph_core.hpp"
#include "chronograph/matfun.hpp"

namespace chronograph {

/// Block operator B on K = X_0 + ... + X_{n-1}. Block (i, j) maps the
/// terminal value of edge j into the initial condition of edge i. Absent
/// blocks are zero.
class TransmissionOperator {
public:
    using Key = std::pair<std::size_t, std::size_t>;

    void set_block(std::size_t row, std::size_t col, Matrix block);
    [[nodiscard]] const std::map<Key, Matrix>& blocks() const noexcept { return blocks_; }
    [[nodiscard]] bool empty() const noexcept { return blocks_.empty(); }

    /// Dense matrix over K. Assumes every block is shaped dims[i] x dims[j].
    [[nodiscard]] Matrix assemble(const TimeGraph& graph) const;

    static TransmissionOperator from_dense(const TimeGraph& graph, const Matrix& dense);

private:
    std::map<Key, Matrix> blocks_;
};

[[nodiscard]] BlockPattern pattern_of(const TransmissionOperator& b, std::size_t edge_count,
                                      double tol = 0.0);

struct ZeroForcing {};
struct ConstantForcing {
    Vector value;
};
/// Values at the edge's steps + 1 uniform grid nodes, linear in between.
struct SampledForcing {
    std::vector<Vector> values;
};
using ForcingTerm = std::variant<ZeroForcing, ConstantForcing, SampledForcing>;

/// f at grid node k of an edge with the given dimension.
[[nodiscard]] Vector forcing_at(const ForcingTerm& f, std::size_t k, int dim);

struct TimeGraphProblem;

/// Forcing of edge j at node k of a uniform grid with `intervals` intervals,
/// linear between the problem's own sample nodes.
[[nodiscard]] Vector forcing_on_grid(const TimeGraphProblem& problem, std::size_t j, std::size_t k,
                                     std::size_t intervals);

/// The time-graph Cauchy problem
///   d/dt psi_j - A_j psi_j = f_j  on (0, a_j),   psi_- - B psi_+ = g.
/// Every per-edge vector is indexed in graph edge order.
struct TimeGraphProblem {
    TimeGraph graph;
    std::vector<Matrix> operators;  // A_j, dims[j] x dims[j]
    TransmissionOperator transmission;
    std::vector<Vector> g;          // size-0 entries mean zero
    std::vector<ForcingTerm> forcing;
    std::vector<int> steps;         // uniform substeps per edge

    [[nodiscard]] std::size_t edge_count() const noexcept { return graph.edge_count(); }
    [[nodiscard]] double step_size(std::size_t j) const {
        return graph.length(j) / static_cast<double>(steps.at(j));
    }
};

/// Empty iff the problem is dimensionally consistent and every length,
/// dimension and step count is positive.
[[nodiscard]] std::vector<Violation> validate(const TimeGraphProblem& problem);

/// Throws ValidationError when validate() reports anything.
void require_valid(const TimeGraphProblem& problem);

struct HypothesisReport {
    /// mu(A_j) = lambda_max((A_j + A_j*) / 2), the numerical abscissa.
    std::vector<double> dissipativity_margin;
    double b_norm = 0.0;
    double monodromy_rcond = 0.0;
    /// -max_j mu(A_j); positive when every A_j + epsilon is dissipative.
    double epsilon = 0.0;
    bool sufficient_condition_met = false;
    /// ||A_V B - B A_V|| with A_V = diag(A_j). Informational only.
    double commutator_norm = 0.0;
};

/// Tolerance used when comparing mu(A_j) with 0 and ||B|| with 1.
inline constexpr double kHypothesisTol = 1e-12;

[[nodiscard]] HypothesisReport diagnose(const TimeGraphProblem& problem);

/// Concatenates per-edge vectors in graph order; empty entries become zero.
[[nodiscard]] Vector assemble_k_vector(const TimeGraph& graph, std::span<const Vector> per_edge);
[[nodiscard]] Vector g_vector(const TimeGraphProblem& problem);

/// Splits a K-vector back into per-edge pieces.
[[nodiscard]] std::vector<Vector> split_k_vector(const TimeGraph& graph, const Vector& k);

[[nodiscard]] Matrix dense_transmission(const TimeGraphProblem& problem);

/// Reciprocal condition of M = 1 - BE against perturbations of both terms,
/// 1 / (||M^{-1}||_1 (1 + ||BE||_1)). Unlike rcond(M) it also sees
/// cancellation: the scalar 1 - e^{2 pi i} is noise, not a well-posed 1x1.
[[nodiscard]] double monodromy_rcond(const Matrix& m, const Matrix& be);

}  // namespace chronograph
