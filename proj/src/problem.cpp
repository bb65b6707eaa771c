#include "chronograph/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace chronograph {

void TransmissionOperator::set_block(std::size_t row, std::size_t col, Matrix block) {
    blocks_[{row, col}] = std::move(block);
}

Matrix TransmissionOperator::assemble(const TimeGraph& graph) const {
    const auto n = static_cast<Eigen::Index>(graph.total_dim());
    Matrix out = Matrix::Zero(n, n);
    for (const auto& [key, block] : blocks_) {
        const auto r = static_cast<Eigen::Index>(graph.offset(key.first));
        const auto c = static_cast<Eigen::Index>(graph.offset(key.second));
        out.block(r, c, block.rows(), block.cols()) = block;
    }
    return out;
}

TransmissionOperator TransmissionOperator::from_dense(const TimeGraph& graph, const Matrix& dense) {
    TransmissionOperator b;
    for (std::size_t i = 0; i < graph.edge_count(); ++i) {
        for (std::size_t j = 0; j < graph.edge_count(); ++j) {
            Matrix block = dense.block(static_cast<Eigen::Index>(graph.offset(i)),
                                       static_cast<Eigen::Index>(graph.offset(j)), graph.dim(i),
                                       graph.dim(j));
            if (block.cwiseAbs().maxCoeff() > 0.0) b.set_block(i, j, std::move(block));
        }
    }
    return b;
}

BlockPattern pattern_of(const TransmissionOperator& b, std::size_t edge_count, double tol) {
    BlockPattern p{edge_count, {}};
    for (const auto& [key, block] : b.blocks()) {
        if (block.size() > 0 && block.cwiseAbs().maxCoeff() > tol) p.nonzero.insert(key);
    }
    return p;
}

Vector forcing_at(const ForcingTerm& f, std::size_t k, int dim) {
    return std::visit(
        [&](const auto& term) -> Vector {
            using T = std::decay_t<decltype(term)>;
            if constexpr (std::is_same_v<T, ZeroForcing>) {
                return Vector::Zero(dim);
            } else if constexpr (std::is_same_v<T, ConstantForcing>) {
                return term.value;
            } else {
                return term.values.at(k);
            }
        },
        f);
}

Vector forcing_on_grid(const TimeGraphProblem& problem, std::size_t j, std::size_t k, std::size_t intervals) {
    const int dim = problem.graph.dim(j);
    const ForcingTerm& f = problem.forcing[j];
    if (!std::holds_alternative<SampledForcing>(f)) return forcing_at(f, 0, dim);
    const auto steps = static_cast<std::size_t>(problem.steps[j]);
    // Node k of the target grid sits at sample position k * steps / intervals.
    const std::size_t scaled = k * steps;
    const std::size_t q = scaled / intervals;
    const std::size_t r = scaled % intervals;
    const Vector lo = forcing_at(f, q, dim);
    if (r == 0) return lo;
    const double w = static_cast<double>(r) / static_cast<double>(intervals);
    return lo + w * (forcing_at(f, q + 1, dim) - lo);
}

std::vector<Violation> validate(const TimeGraphProblem& p) {
    std::vector<Violation> out;
    auto add = [&](std::string field, std::string constraint) {
        out.push_back({std::move(field), std::move(constraint)});
    };
    const auto& g = p.graph;
    const std::size_t n = g.edge_count();
    if (n == 0) add("edges", "at least one edge required");

    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = g.edge(i);
        const std::string where = "edges[" + e.id + "]";
        if (!(e.length > 0.0) || !std::isfinite(e.length)) add(where + ".length", "must be finite and > 0");
        if (e.dim < 1) add(where + ".dim", "must be >= 1");
        for (std::size_t k = 0; k < i; ++k) {
            if (g.edge(k).id == e.id) add(where + ".id", "duplicate edge id");
        }
    }
    if (!out.empty()) return out;

    auto edge_name = [&](std::size_t i) { return "edges[" + g.edge(i).id + "]"; };

    if (p.operators.size() != n) {
        add("operators", "expected one operator per edge");
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = p.operators[i];
            if (a.rows() != g.dim(i) || a.cols() != g.dim(i))
                add(edge_name(i) + ".A", "shape must be dim x dim");
            else if (!a.allFinite())
                add(edge_name(i) + ".A", "entries must be finite");
        }
    }

    for (const auto& [key, block] : p.transmission.blocks()) {
        const auto [r, c] = key;
        std::ostringstream where;
        where << "blocks(" << r << "," << c << ")";
        if (r >= n || c >= n) {
            add(where.str(), "edge index out of range");
            continue;
        }
        if (block.rows() != g.dim(r) || block.cols() != g.dim(c)) {
            std::ostringstream msg;
            msg << "shape " << block.rows() << "x" << block.cols() << " does not match dims "
                << g.dim(r) << "x" << g.dim(c);
            add(where.str(), msg.str());
        } else if (!block.allFinite()) {
            add(where.str(), "entries must be finite");
        }
    }

    if (!p.g.empty() && p.g.size() != n) {
        add("g", "expected one entry per edge");
    } else {
        for (std::size_t i = 0; i < p.g.size(); ++i) {
            if (p.g[i].size() != 0 && p.g[i].size() != g.dim(i))
                add(edge_name(i) + ".g", "length must equal dim");
        }
    }

    if (p.steps.size() != n) {
        add("steps", "expected one step count per edge");
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            if (p.steps[i] < 1) add(edge_name(i) + ".steps", "must be >= 1");
        }
    }

    if (p.forcing.size() != n) {
        add("forcing", "expected one forcing term per edge");
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& f = p.forcing[i];
            if (const auto* c = std::get_if<ConstantForcing>(&f)) {
                if (c->value.size() != g.dim(i)) add(edge_name(i) + ".f", "constant length must equal dim");
            } else if (const auto* s = std::get_if<SampledForcing>(&f)) {
                const bool steps_known = p.steps.size() == n && p.steps[i] >= 1;
                if (steps_known && s->values.size() != static_cast<std::size_t>(p.steps[i]) + 1)
                    add(edge_name(i) + ".f", "sample count must equal steps + 1");
                for (const auto& v : s->values) {
                    if (v.size() != g.dim(i)) {
                        add(edge_name(i) + ".f", "sample length must equal dim");
                        break;
                    }
                }
            }
        }
    }
    return out;
}

void require_valid(const TimeGraphProblem& problem) {
    auto violations = validate(problem);
    if (!violations.empty()) throw ValidationError(std::move(violations));
}

Vector assemble_k_vector(const TimeGraph& graph, std::span<const Vector> per_edge) {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(graph.total_dim()));
    for (std::size_t i = 0; i < graph.edge_count() && i < per_edge.size(); ++i) {
        if (per_edge[i].size() == 0) continue;
        if (per_edge[i].size() != graph.dim(i)) throw DimensionError("assemble_k_vector: length mismatch");
        out.segment(static_cast<Eigen::Index>(graph.offset(i)), graph.dim(i)) = per_edge[i];
    }
    return out;
}

Vector g_vector(const TimeGraphProblem& problem) {
    return assemble_k_vector(problem.graph, problem.g);
}

std::vector<Vector> split_k_vector(const TimeGraph& graph, const Vector& k) {
    if (k.size() != static_cast<Eigen::Index>(graph.total_dim()))
        throw DimensionError("split_k_vector: length mismatch");
    std::vector<Vector> out;
    out.reserve(graph.edge_count());
    for (std::size_t i = 0; i < graph.edge_count(); ++i)
        out.push_back(k.segment(static_cast<Eigen::Index>(graph.offset(i)), graph.dim(i)));
    return out;
}

Matrix dense_transmission(const TimeGraphProblem& problem) {
    return problem.transmission.assemble(problem.graph);
}

HypothesisReport diagnose(const TimeGraphProblem& problem) {
    require_valid(problem);
    HypothesisReport r;
    double max_mu = -std::numeric_limits<double>::infinity();
    std::vector<Matrix> exps;
    for (std::size_t j = 0; j < problem.edge_count(); ++j) {
        const Matrix& a = problem.operators[j];
        const Matrix sym = (a + a.adjoint()) / 2.0;
        Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
        const double mu = es.eigenvalues().maxCoeff();
        r.dissipativity_margin.push_back(mu);
        max_mu = std::max(max_mu, mu);
        exps.push_back(expm(a, problem.graph.length(j)));
    }
    const Matrix b = dense_transmission(problem);
    r.b_norm = operator_norm(b);
    const Matrix e = block_diagonal(exps);
    const Matrix be = b * e;
    r.monodromy_rcond = monodromy_rcond(Matrix::Identity(b.rows(), b.cols()) - be, be);
    r.epsilon = -max_mu;

    const bool dissipative = max_mu <= kHypothesisTol;
    const bool strictly_dissipative = max_mu < -kHypothesisTol;
    const bool strict_contraction = r.b_norm < 1.0 - kHypothesisTol;
    const bool contraction = r.b_norm <= 1.0 + kHypothesisTol;
    r.sufficient_condition_met =
        (dissipative && strict_contraction) || (strictly_dissipative && contraction);

    std::vector<Matrix> ops(problem.operators.begin(), problem.operators.end());
    const Matrix av = block_diagonal(ops);
    r.commutator_norm = operator_norm(av * b - b * av);
    return r;
}

double monodromy_rcond(const Matrix& m, const Matrix& be) {
    if (m.rows() == 0) return 1.0;
    const double rc = rcond_estimate(m);
    if (rc == 0.0) return 0.0;
    const double m_norm = m.cwiseAbs().colwise().sum().maxCoeff();
    const double be_norm = be.cwiseAbs().colwise().sum().maxCoeff();
    // rc = 1 / (||M|| ||M^{-1}||), so rescale ||M|| to 1 + ||BE||.
    return rc * m_norm / (1.0 + be_norm);
}

}  // namespace chronograph
