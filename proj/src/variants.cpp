#include "chronograph/variants.hpp"

#include <algorithm>
#include <cmath>

namespace chronograph {

namespace {

double inf_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Matrix inverse_or_throw(const Matrix& m, const char* what, int stage = 0) {
    try {
        return solve_linear(m, Matrix::Identity(m.rows(), m.cols())).x;
    } catch (const SingularMatrix& e) {
        throw NotWellPosed(what, e.rcond(), stage);
    }
}

// diag_j f(a_j H_j) through each edge's Hermitian eigensystem.
Matrix block_funm(const std::vector<HermitianEigenSystem>& eig, const std::function<Complex(std::size_t, double)>& f) {
    std::vector<Matrix> blocks;
    for (std::size_t j = 0; j < eig.size(); ++j)
        blocks.push_back(funm_hermitian(eig[j], [&](double x) { return f(j, x); }));
    return block_diagonal(blocks);
}

}  // namespace

void require_hermitian(const SchrodingerProblem& p) {
    for (std::size_t j = 0; j < p.base.operators.size(); ++j) {
        if (!is_hermitian(p.base.operators[j]))
            throw NotHermitian("edge " + p.base.graph.edge(j).id + ": H is not Hermitian");
    }
}

TimeGraphProblem schrodinger_generators(const SchrodingerProblem& p) {
    require_valid(p.base);
    require_hermitian(p);
    TimeGraphProblem out = p.base;
    for (auto& h : out.operators) h = Complex(0.0, 1.0) * h;
    return out;
}

SolveReport schrodinger_solve(const SchrodingerProblem& p) { return solve(schrodinger_generators(p)); }

UnitarityResult unitarity_check(const SchrodingerProblem& p, int samples) {
    require_valid(p.base);
    require_hermitian(p);
    const TimeGraph& graph = p.base.graph;
    std::vector<HermitianEigenSystem> eig;
    double max_length = 0.0;
    for (std::size_t j = 0; j < graph.edge_count(); ++j) {
        eig.push_back(hermitian_eig(p.base.operators[j]));
        max_length = std::max(max_length, graph.length(j));
    }
    const Matrix b = dense_transmission(p.base);
    const Matrix u = block_funm(eig, [&](std::size_t j, double x) { return std::exp(Complex(0.0, graph.length(j) * x)); });
    const Matrix cos_ah = block_funm(eig, [&](std::size_t j, double x) { return Complex(std::cos(graph.length(j) * x)); });

    UnitarityResult r;
    r.commutator_norm = operator_norm(b * u - u * b);
    if (r.commutator_norm > kCommutatorTol * std::max(1.0, operator_norm(b)))
        throw NonCommuting("B does not commute with e^{iaH}", r.commutator_norm);

    r.defect = operator_norm(b * b - 2.0 * b * cos_ah);
    r.unitary = r.defect <= kUnitarityTol;

    const Matrix m = Matrix::Identity(b.rows(), b.cols()) - b * u;
    const Matrix m_inv = inverse_or_throw(m, "1 - B e^{iaH} is singular");
    const Matrix id = Matrix::Identity(m.rows(), m.cols());
    const int count = std::max(samples, 1);
    for (int k = 0; k < count; ++k) {
        const double t = count == 1 ? 0.0 : max_length * k / (count - 1);
        const Matrix et = block_funm(eig, [&](std::size_t, double x) { return std::exp(Complex(0.0, t * x)); });
        const Matrix s = et * m_inv;
        r.sample_times.push_back(t);
        r.propagator_defect = std::max(r.propagator_defect, operator_norm(s * s.adjoint() - id));
    }
    return r;
}

namespace {

std::vector<Matrix> square_roots(const SecondOrderProblem& p) {
    std::vector<Violation> bad;
    std::vector<Matrix> roots;
    for (std::size_t j = 0; j < p.operators.size(); ++j) {
        const std::string where = "edges[" + p.graph.edge(j).id + "].A";
        if (!is_hermitian(p.operators[j])) {
            bad.push_back({where, "must be Hermitian"});
            continue;
        }
        const auto e = hermitian_eig(p.operators[j]);
        const double scale = std::max(1.0, e.eigenvalues.cwiseAbs().maxCoeff());
        if (e.eigenvalues.cwiseAbs().minCoeff() <= 1e-12 * scale) {
            bad.push_back({where, "must be invertible"});
            continue;
        }
        roots.push_back(funm_hermitian(e, [](double x) { return Complex(std::sqrt(std::abs(x))); }));
    }
    if (!bad.empty()) throw ValidationError(std::move(bad));
    return roots;
}

}  // namespace

TimeGraphProblem second_order_stage1(const SecondOrderProblem& p, const std::vector<Matrix>& roots) {
    TimeGraphProblem s;
    s.graph = p.graph;
    for (const auto& r : roots) s.operators.push_back(Complex(0.0, -1.0) * r);
    s.transmission = p.b2;
    s.g = p.g2;
    s.forcing = p.forcing;
    s.steps = p.steps;
    return s;
}

TimeGraphProblem second_order_stage2(const SecondOrderProblem& p, const std::vector<Matrix>& roots,
                                     const SolveReport& phi) {
    TimeGraphProblem s;
    s.graph = p.graph;
    for (const auto& r : roots) s.operators.push_back(Complex(0.0, 1.0) * r);
    s.transmission = p.b1;
    s.g = p.g1;
    for (const auto& sol : phi.solutions) s.forcing.push_back(SampledForcing{sol.states});
    s.steps = p.steps;
    return s;
}

SecondOrderReport second_order_solve(const SecondOrderProblem& p) {
    if (p.operators.size() != p.graph.edge_count())
        throw ValidationError(std::vector<Violation>{{"operators", "expected one operator per edge"}});
    SecondOrderReport out;
    out.roots = square_roots(p);
    try {
        out.stage1 = solve(second_order_stage1(p, out.roots));
    } catch (const NotWellPosed& e) {
        throw NotWellPosed(std::string("stage 1: ") + e.what(), e.rcond(), 1);
    }
    try {
        out.stage2 = solve(second_order_stage2(p, out.roots, out.stage1));
    } catch (const NotWellPosed& e) {
        throw NotWellPosed(std::string("stage 2: ") + e.what(), e.rcond(), 2);
    }
    return out;
}

namespace {

bool is_real(const Matrix& m) { return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() == 0.0; }
bool is_real(const Vector& v) { return v.size() == 0 || v.imag().cwiseAbs().maxCoeff() == 0.0; }

bool nonnegative(const Matrix& m) {
    return m.size() == 0 || (is_real(m) && m.real().minCoeff() >= kNonnegativeTol);
}

bool metzler(const Matrix& a) {
    if (!is_real(a)) return false;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (i != j && a(i, j).real() < kNonnegativeTol) return false;
    return true;
}

std::vector<Vector> forcing_samples(const TimeGraphProblem& p, std::size_t j) {
    const int dim = p.graph.dim(j);
    if (const auto* s = std::get_if<SampledForcing>(&p.forcing[j])) return s->values;
    return {forcing_at(p.forcing[j], 0, dim)};
}

}  // namespace

MappingReport verify_mapping_properties(const SolveReport& report, const TimeGraphProblem& problem) {
    require_valid(problem);
    const std::size_t n = problem.edge_count();
    MappingReport r;

    bool real = true, b_nonneg = true, a_metzler = true, g_nonneg = true, f_nonneg = true;
    double f_sup = 0.0;
    for (const auto& [key, block] : problem.transmission.blocks()) {
        real = real && is_real(block);
        b_nonneg = b_nonneg && nonnegative(block);
    }
    for (std::size_t j = 0; j < n; ++j) {
        real = real && is_real(problem.operators[j]);
        a_metzler = a_metzler && metzler(problem.operators[j]);
        for (const auto& v : forcing_samples(problem, j)) {
            real = real && is_real(v);
            f_nonneg = f_nonneg && nonnegative(Matrix(v));
            f_sup = std::max(f_sup, inf_norm(v));
        }
    }
    const Vector g = g_vector(problem);
    real = real && is_real(g);
    g_nonneg = nonnegative(Matrix(g));

    const Monodromy mono = assemble_monodromy(problem);
    const Matrix m_inv = inverse_or_throw(mono.M, "monodromy 1 - B e^{aA} is singular");
    const bool inverse_nonneg = nonnegative(m_inv);

    if (!real) r.unmet.emplace_back("real_data");
    if (!b_nonneg) r.unmet.emplace_back("B_nonnegative");
    if (!a_metzler) r.unmet.emplace_back("A_metzler");
    if (!inverse_nonneg) r.unmet.emplace_back("monodromy_inverse_nonnegative");
    if (!g_nonneg) r.unmet.emplace_back("g_nonnegative");
    if (!f_nonneg) r.unmet.emplace_back("f_nonnegative");
    r.real_applicable = real;
    r.positivity_applicable = real && b_nonneg && a_metzler && inverse_nonneg && g_nonneg && f_nonneg;

    double min_re = 0.0;
    for (const auto& sol : report.solutions) {
        for (const auto& s : sol.states) {
            if (s.size() == 0) continue;
            r.real_defect = std::max(r.real_defect, s.imag().cwiseAbs().maxCoeff());
            min_re = std::min(min_re, s.real().minCoeff());
            r.sup_norm = std::max(r.sup_norm, inf_norm(s));
        }
    }
    r.positivity_defect = -min_re;

    // K bounds ||e^{tA_j}||_inf on a grid four times finer than the solver's.
    double k_sup = 1.0, a_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const int fine = 4 * problem.steps[j];
        const Matrix step = expm(problem.operators[j], problem.graph.length(j) / fine);
        Matrix e = Matrix::Identity(problem.graph.dim(j), problem.graph.dim(j));
        for (int k = 0; k < fine; ++k) {
            e = step * e;
            k_sup = std::max(k_sup, inf_norm(e));
        }
        a_max = std::max(a_max, problem.graph.length(j));
    }
    const double b_inf = inf_norm(dense_transmission(problem));
    const double m_inf = inf_norm(m_inv);
    // ||psi|| <= K ||c|| + K a ||f||, ||c|| <= ||M^{-1}|| (||g|| + ||B|| K a ||f||).
    r.sup_constant = std::max(k_sup * m_inf, k_sup * m_inf * b_inf * k_sup * a_max + k_sup * a_max);
    r.sup_bound = r.sup_constant * (inf_norm(g) + f_sup);
    r.sup_bound_defect = std::max(0.0, r.sup_norm - r.sup_bound);
    r.sup_ratio = r.sup_bound > 0.0 ? r.sup_norm / r.sup_bound : 0.0;
    return r;
}

void require_mapping_hypotheses(const MappingReport& report) {
    if (!report.unmet.empty()) throw HypothesesNotMet(report.unmet);
}

}  // namespace chronograph
