#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chronograph {

/// Finite metric time-graph: an ordered list of internal edges, each an
/// interval [0, length] carrying a state space of dimension `dim`.
/// Vertices are implicit; all coupling lives in the transmission operator.
class TimeGraph {
public:
    struct Edge {
        std::string id;
        double length = 1.0;
        int dim = 1;
    };

    TimeGraph() = default;
    explicit TimeGraph(std::vector<Edge> edges) : edges_(std::move(edges)) {}

    std::size_t add_edge(std::string id, double length, int dim);

    [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const Edge& edge(std::size_t i) const { return edges_.at(i); }
    [[nodiscard]] double length(std::size_t i) const { return edges_.at(i).length; }
    [[nodiscard]] int dim(std::size_t i) const { return edges_.at(i).dim; }
    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view id) const;

    /// Offset of edge i inside the boundary-value space K = X_0 + ... + X_{n-1}.
    [[nodiscard]] std::size_t offset(std::size_t i) const;
    [[nodiscard]] std::size_t total_dim() const;

    friend bool operator==(const TimeGraph&, const TimeGraph&) = default;

private:
    std::vector<Edge> edges_;
};

inline bool operator==(const TimeGraph::Edge& a, const TimeGraph::Edge& b) {
    return a.id == b.id && a.length == b.length && a.dim == b.dim;
}

/// Nonzero block structure of a transmission operator. (i, j) present means
/// block B_ij != 0: the initial value of edge i depends on the terminal value
/// of edge j.
struct BlockPattern {
    std::size_t n = 0;
    std::set<std::pair<std::size_t, std::size_t>> nonzero;

    [[nodiscard]] bool contains(std::size_t i, std::size_t j) const {
        return nonzero.count({i, j}) != 0;
    }
    [[nodiscard]] bool well_formed() const;
    [[nodiscard]] bool has_diagonal() const;
};

enum class SolvabilityClass {
    IvpSequence,     // sequence of initial value problems
    CauchySequence,  // sequence of single-interval Cauchy problems
    GlobalOnly       // boundary-reflected loop; needs the coupled solve
};

[[nodiscard]] std::string_view to_string(SolvabilityClass c) noexcept;

struct SolvabilityReport {
    SolvabilityClass cls = SolvabilityClass::IvpSequence;
    /// Edge order in which B is block lower-triangular (sources first).
    std::optional<std::vector<std::size_t>> ordering;
    /// Cycle c_0 .. c_{m-1} with every (c_k, c_{k+1 mod m}) in the pattern.
    std::optional<std::vector<std::size_t>> blocking_cycle;
};

[[nodiscard]] SolvabilityReport classify_solvability(const BlockPattern& pattern);

/// Strongly connected components of the digraph with arcs j -> i for every
/// off-diagonal (i, j) in the pattern, in Tarjan's order (sinks first).
[[nodiscard]] std::vector<std::vector<std::size_t>> dependency_components(const BlockPattern& pattern);

/// True if `ordering` is a permutation under which every nonzero (i, j)
/// satisfies position(j) <= position(i).
[[nodiscard]] bool is_lower_triangular_ordering(const BlockPattern& pattern,
                                                const std::vector<std::size_t>& ordering);

/// Relabel edges: edge i becomes perm[i].
[[nodiscard]] BlockPattern permute_pattern(const BlockPattern& pattern,
                                           const std::vector<std::size_t>& perm);

}  // namespace chronograph
