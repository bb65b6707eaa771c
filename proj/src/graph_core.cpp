#include "chronograph/graph_core.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace chronograph {

std::size_t TimeGraph::add_edge(std::string id, double length, int dim) {
    edges_.push_back({std::move(id), length, dim});
    return edges_.size() - 1;
}

std::optional<std::size_t> TimeGraph::index_of(std::string_view id) const {
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (edges_[i].id == id) return i;
    }
    return std::nullopt;
}

std::size_t TimeGraph::offset(std::size_t i) const {
    if (i > edges_.size()) throw std::out_of_range("TimeGraph::offset");
    std::size_t off = 0;
    for (std::size_t k = 0; k < i; ++k) off += static_cast<std::size_t>(std::max(edges_[k].dim, 0));
    return off;
}

std::size_t TimeGraph::total_dim() const { return offset(edges_.size()); }

bool BlockPattern::well_formed() const {
    return std::all_of(nonzero.begin(), nonzero.end(),
                       [this](const auto& p) { return p.first < n && p.second < n; });
}

bool BlockPattern::has_diagonal() const {
    return std::any_of(nonzero.begin(), nonzero.end(),
                       [](const auto& p) { return p.first == p.second; });
}

std::string_view to_string(SolvabilityClass c) noexcept {
    switch (c) {
        case SolvabilityClass::IvpSequence: return "IVP_SEQUENCE";
        case SolvabilityClass::CauchySequence: return "CAUCHY_SEQUENCE";
        case SolvabilityClass::GlobalOnly: return "GLOBAL_ONLY";
    }
    return "UNKNOWN";
}

namespace {

// successors[j] lists i with (i, j) nonzero, i != j: information flows j -> i.
std::vector<std::vector<std::size_t>> dependency_successors(const BlockPattern& p) {
    std::vector<std::vector<std::size_t>> succ(p.n);
    for (const auto& [i, j] : p.nonzero) {
        if (i != j) succ[j].push_back(i);
    }
    for (auto& s : succ) std::sort(s.begin(), s.end());
    return succ;
}

class Tarjan {
public:
    explicit Tarjan(const std::vector<std::vector<std::size_t>>& succ)
        : succ_(succ), index_(succ.size(), kUnvisited), low_(succ.size(), 0),
          on_stack_(succ.size(), false) {}

    std::vector<std::vector<std::size_t>> run() {
        for (std::size_t v = 0; v < succ_.size(); ++v) {
            if (index_[v] == kUnvisited) visit(v);
        }
        return std::move(components_);
    }

private:
    static constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();

    void visit(std::size_t v) {
        index_[v] = low_[v] = counter_++;
        stack_.push_back(v);
        on_stack_[v] = true;
        for (std::size_t w : succ_[v]) {
            if (index_[w] == kUnvisited) {
                visit(w);
                low_[v] = std::min(low_[v], low_[w]);
            } else if (on_stack_[w]) {
                low_[v] = std::min(low_[v], index_[w]);
            }
        }
        if (low_[v] == index_[v]) {
            std::vector<std::size_t> comp;
            std::size_t w = 0;
            do {
                w = stack_.back();
                stack_.pop_back();
                on_stack_[w] = false;
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            components_.push_back(std::move(comp));
        }
    }

    const std::vector<std::vector<std::size_t>>& succ_;
    std::vector<std::size_t> index_, low_;
    std::vector<bool> on_stack_;
    std::vector<std::size_t> stack_;
    std::vector<std::vector<std::size_t>> components_;
    std::size_t counter_ = 0;
};

// Shortest cycle through `start` in the relation (c_k, c_{k+1}) in pattern,
// restricted to `members`. BFS along "row i reflects column j" arcs i -> j.
std::optional<std::vector<std::size_t>> shortest_cycle_through(
    const BlockPattern& p, std::size_t start, const std::vector<bool>& members) {
    std::vector<std::vector<std::size_t>> next(p.n);
    for (const auto& [i, j] : p.nonzero) {
        if (i != j && members[i] && members[j]) next[i].push_back(j);
    }
    for (auto& s : next) std::sort(s.begin(), s.end());

    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> parent(p.n, none);
    std::vector<bool> seen(p.n, false);
    std::queue<std::size_t> q;
    q.push(start);
    seen[start] = true;
    while (!q.empty()) {
        std::size_t v = q.front();
        q.pop();
        for (std::size_t w : next[v]) {
            if (w == start) {
                std::vector<std::size_t> cycle;
                for (std::size_t u = v; u != none; u = parent[u]) cycle.push_back(u);
                std::reverse(cycle.begin(), cycle.end());
                return cycle;
            }
            if (!seen[w]) {
                seen[w] = true;
                parent[w] = v;
                q.push(w);
            }
        }
    }
    return std::nullopt;
}

}  // namespace

std::vector<std::vector<std::size_t>> dependency_components(const BlockPattern& pattern) {
    auto succ = dependency_successors(pattern);
    return Tarjan(succ).run();
}

SolvabilityReport classify_solvability(const BlockPattern& pattern) {
    if (!pattern.well_formed()) throw std::invalid_argument("classify_solvability: index out of range");

    auto components = dependency_components(pattern);
    const bool acyclic = std::all_of(components.begin(), components.end(),
                                     [](const auto& c) { return c.size() == 1; });

    SolvabilityReport report;
    if (acyclic) {
        // Kahn with smallest-index tie break gives a reproducible topological order.
        auto succ = dependency_successors(pattern);
        std::vector<std::size_t> indegree(pattern.n, 0);
        for (const auto& s : succ)
            for (std::size_t w : s) ++indegree[w];
        std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
        for (std::size_t v = 0; v < pattern.n; ++v)
            if (indegree[v] == 0) ready.push(v);
        std::vector<std::size_t> order;
        order.reserve(pattern.n);
        while (!ready.empty()) {
            std::size_t v = ready.top();
            ready.pop();
            order.push_back(v);
            for (std::size_t w : succ[v])
                if (--indegree[w] == 0) ready.push(w);
        }
        report.cls = pattern.has_diagonal() ? SolvabilityClass::CauchySequence
                                            : SolvabilityClass::IvpSequence;
        report.ordering = std::move(order);
        return report;
    }

    // First nontrivial SCC = the one holding the smallest edge index.
    const std::vector<std::size_t>* first = nullptr;
    for (const auto& c : components) {
        if (c.size() > 1 && (first == nullptr || c.front() < first->front())) first = &c;
    }
    std::vector<bool> members(pattern.n, false);
    for (std::size_t v : *first) members[v] = true;

    std::optional<std::vector<std::size_t>> best;
    for (std::size_t v : *first) {
        auto cycle = shortest_cycle_through(pattern, v, members);
        if (cycle && (!best || cycle->size() < best->size())) best = std::move(cycle);
    }
    report.cls = SolvabilityClass::GlobalOnly;
    report.blocking_cycle = std::move(best);
    return report;
}

bool is_lower_triangular_ordering(const BlockPattern& pattern,
                                  const std::vector<std::size_t>& ordering) {
    if (ordering.size() != pattern.n) return false;
    std::vector<std::size_t> position(pattern.n, pattern.n);
    for (std::size_t k = 0; k < ordering.size(); ++k) {
        if (ordering[k] >= pattern.n || position[ordering[k]] != pattern.n) return false;
        position[ordering[k]] = k;
    }
    return std::all_of(pattern.nonzero.begin(), pattern.nonzero.end(), [&](const auto& p) {
        return position[p.second] <= position[p.first];
    });
}

BlockPattern permute_pattern(const BlockPattern& pattern, const std::vector<std::size_t>& perm) {
    if (perm.size() != pattern.n) throw std::invalid_argument("permute_pattern: size mismatch");
    BlockPattern out{pattern.n, {}};
    for (const auto& [i, j] : pattern.nonzero) out.nonzero.insert({perm[i], perm[j]});
    return out;
}

}  // namespace chronograph
