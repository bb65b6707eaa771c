#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "chronograph/oracle.hpp"
#include "chronograph/scenarios.hpp"
#include "chronograph/solver.hpp"
#include "helpers.hpp"

using namespace chronograph;
using namespace chronograph::testing;

namespace {

const double kE1 = std::exp(-1.0);

// Random well-posed problem: complex operators with negative shift, ||B|| < 1.
TimeGraphProblem random_problem(std::mt19937_64& rng, int steps = 40) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    TimeGraphProblem p;
    const int n = 2 + static_cast<int>(rng() % 3);
    for (int j = 0; j < n; ++j) {
        const int d = 1 + static_cast<int>(rng() % 3);
        p.graph.add_edge("e" + std::to_string(j), 0.5 + unit(rng), d);
        Matrix a(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) a(r, c) = Complex(normal(rng), normal(rng)) * 0.5;
        p.operators.push_back(a - 0.5 * Matrix::Identity(d, d));
        Vector g(d), f(d);
        for (int r = 0; r < d; ++r) {
            g(r) = Complex(normal(rng), normal(rng));
            f(r) = Complex(normal(rng), normal(rng));
        }
        p.g.push_back(g);
        p.forcing.push_back(ConstantForcing{f});
        p.steps.push_back(steps);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (unit(rng) < 0.5) continue;
            const int di = p.graph.dim(i), dj = p.graph.dim(j);
            Matrix b(di, dj);
            for (int r = 0; r < di; ++r)
                for (int c = 0; c < dj; ++c) b(r, c) = Complex(normal(rng), normal(rng));
            p.transmission.set_block(i, j, b);
        }
    }
    const Matrix dense = dense_transmission(p);
    const double norm = operator_norm(dense);
    if (norm > 0.0) p.transmission = TransmissionOperator::from_dense(p.graph, dense * (0.9 / norm));
    return p;
}

double max_state(const SolveReport& r) {
    double m = 0.0;
    for (const auto& s : r.solutions)
        for (const auto& v : s.states) m = std::max(m, v.norm());
    return m;
}

}  // namespace

TEST(Monodromy, ScalarPeriodic) {
    const auto mono = assemble_monodromy(scalar_loop(-1.0, 1.0, 1.0));
    EXPECT_NEAR(mono.E(0, 0).real(), kE1, 1e-15);
    EXPECT_NEAR(mono.M(0, 0).real(), 1.0 - kE1, 1e-15);
}

TEST(Monodromy, ZeroCouplingGivesIdentity) {
    std::mt19937_64 rng(40);
    auto p = random_problem(rng);
    p.transmission = TransmissionOperator{};
    const auto mono = assemble_monodromy(p);
    EXPECT_EQ(mono.M, Matrix::Identity(mono.M.rows(), mono.M.cols()));
}

TEST(Monodromy, DecoupledLoopsBlockDiagonal) {
    auto p = scalar_problem(2, -1.0, 1.0);
    p.transmission.set_block(0, 0, scalar(1.0));
    p.transmission.set_block(1, 1, scalar(1.0));
    const auto mono = assemble_monodromy(p);
    EXPECT_EQ(mono.M(0, 1), Complex(0.0));
    EXPECT_EQ(mono.M(1, 0), Complex(0.0));
}

TEST(Monodromy, EqualsOneMinusBE) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_problem(rng);
        const auto mono = assemble_monodromy(p);
        const Matrix want = Matrix::Identity(mono.M.rows(), mono.M.cols()) - dense_transmission(p) * mono.E;
        EXPECT_LE((mono.M - want).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(ForcedIntegrals, Examples) {
    EXPECT_EQ(forced_terminal_integrals(scalar_problem(1, -1.0, 0.0))(0), Complex(0.0));
    EXPECT_NEAR(forced_terminal_integrals(scalar_problem(1, 0.0, 3.0, 7, 2.0))(0).real(), 6.0, 1e-14);

    // Oracle: Simpson on 20001 nodes of e^{-(1-s)}.
    std::vector<double> samples;
    const int m = 20000;
    for (int k = 0; k <= m; ++k) samples.push_back(std::exp(-(1.0 - static_cast<double>(k) / m)));
    const double simpson = composite_simpson(samples, 1.0 / m);
    const double f = forced_terminal_integrals(scalar_problem(1, -1.0, 1.0))(0).real();
    EXPECT_NEAR(f, simpson, 1e-14);
    EXPECT_NEAR(f, 0.63212055882855767, 1e-14);
}

TEST(ForcedIntegrals, ExactForLinearForcing) {
    // f(t) = t on [0,1], A = -1: F = int e^{-(1-s)} s ds = e^{-1}.
    auto p = scalar_problem(1, -1.0, 0.0, 3);
    p.forcing[0] = SampledForcing{{vec({0.0}), vec({1.0 / 3}), vec({2.0 / 3}), vec({1.0})}};
    EXPECT_NEAR(forced_terminal_integrals(p)(0).real(), kE1, 1e-15);
}

TEST(SolveBoundary, Examples) {
    auto open = scalar_problem(1, -1.0, 1.0);
    open.g[0] = vec({2.5});
    EXPECT_NEAR(solve(open).solutions[0].c(0).real(), 2.5, 1e-15);

    EXPECT_NEAR(solve(scalar_loop(-1.0, 1.0, 1.0)).solutions[0].c(0).real(), 1.0, 1e-14);

    const double want = 2.0 * (1.0 - kE1) / (1.0 - 2.0 * kE1);
    const auto phase = scalar_loop(-1.0, 2.0, 1.0);
    const auto r = solve(phase);
    EXPECT_NEAR(r.solutions[0].c(0).real(), want, 1e-13);
    EXPECT_NEAR(want, 4.784422, 1e-6);
    EXPECT_NEAR(r.solutions[0].states.front()(0).real(), 2.0 * r.solutions[0].states.back()(0).real(), 1e-13);
    const auto picard = picard_boundary(phase);
    ASSERT_TRUE(picard.converged);
    EXPECT_NEAR(picard.c(0).real(), want, 1e-10);
}

TEST(SolveBoundary, SingularThrows) {
    EXPECT_THROW((void)solve(scalar_loop(0.0, 1.0, 1.0)), NotWellPosed);
}

TEST(Propagate, SemigroupTrajectory) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        auto p = random_problem(rng);
        p.transmission = TransmissionOperator{};
        for (auto& f : p.forcing) f = ZeroForcing{};
        const auto r = solve(p);
        for (std::size_t j = 0; j < p.edge_count(); ++j) {
            const auto& s = r.solutions[j];
            EXPECT_EQ(s.states.size(), static_cast<std::size_t>(p.steps[j]) + 1);
            EXPECT_EQ(s.states[0], p.g[j]);
            for (std::size_t k = 0; k < s.states.size(); ++k) {
                const Vector want = expm(p.operators[j], s.times[k]) * p.g[j];
                EXPECT_LE((s.states[k] - want).norm(), 1e-10 * std::max(1.0, want.norm()));
            }
        }
    }
}

TEST(Propagate, PeriodicSteadyState) {
    const auto r = solve(scalar_loop(-1.0, 1.0, 1.0));
    for (const auto& v : r.solutions[0].states) EXPECT_NEAR(std::abs(v(0) - 1.0), 0.0, 1e-14);
    EXPECT_LE(r.boundary_residual, 1e-12);
    EXPECT_FALSE(r.ill_conditioned);
}

TEST(Propagate, Tadpole) {
    auto p = scalar_problem(2, -1.0, 1.0);
    p.forcing[1] = ZeroForcing{};
    p.transmission.set_block(0, 0, scalar(1.0));
    p.transmission.set_block(1, 0, scalar(1.0));
    const auto r = solve(p);
    for (const auto& v : r.solutions[0].states) EXPECT_NEAR(std::abs(v(0) - 1.0), 0.0, 1e-14);
    const auto& tail = r.solutions[1];
    for (std::size_t k = 0; k < tail.states.size(); ++k)
        EXPECT_NEAR(std::abs(tail.states[k](0) - std::exp(-tail.times[k])), 0.0, 1e-14);
    const auto cn = cn_solve(p);
    EXPECT_LE((cn.solutions[1].states.back() - tail.states.back()).norm(), 1e-8);
}

TEST(Propagate, GridIsUniformAndEndpointInclusive) {
    const auto r = solve(scalar_problem(1, -1.0, 1.0, 7, 2.0));
    const auto& t = r.solutions[0].times;
    ASSERT_EQ(t.size(), 8u);
    EXPECT_EQ(t.front(), 0.0);
    EXPECT_EQ(t.back(), 2.0);
    for (std::size_t k = 1; k < t.size(); ++k) EXPECT_NEAR(t[k] - t[k - 1], 2.0 / 7, 1e-15);
}

TEST(Resolvent, Examples) {
    const auto ramp = resolvent_Dt(scalar_problem(1, 5.0, 1.0, 10), 0.0);
    const auto& s = ramp.solutions[0];
    for (std::size_t k = 0; k < s.states.size(); ++k) EXPECT_NEAR(std::abs(s.states[k](0) - s.times[k]), 0.0, 1e-14);

    EXPECT_THROW((void)resolvent_Dt(scalar_loop(5.0, 1.0, 1.0), 0.0), NotWellPosed);

    const auto steady = resolvent_Dt(scalar_loop(5.0, 1.0, 1.0), -1.0);
    for (const auto& v : steady.solutions[0].states) EXPECT_NEAR(std::abs(v(0) - 1.0), 0.0, 1e-14);

    // 2 pi i k is in the spectrum of the periodic D_t.
    EXPECT_THROW((void)resolvent_Dt(scalar_loop(0.0, 1.0, 1.0), Complex(0.0, 2.0 * M_PI)), NotWellPosed);
}

TEST(Grade, Examples) {
    const auto p = scalar_loop(-1.0, 1.0, 1.0);
    EXPECT_EQ(solution_grade(p, solve(p)), SolutionGrade::Classical);

    auto sampled = scalar_problem(1, -1.0, 0.0, 4);
    sampled.forcing[0] = SampledForcing{{vec({0.0}), vec({1.0}), vec({0.0}), vec({1.0}), vec({0.0})}};
    const auto r = solve(sampled);
    EXPECT_EQ(solution_grade(sampled, r), SolutionGrade::Classical);
    EXPECT_EQ(solution_grade(sampled, r, 1.0), SolutionGrade::Strong);

    SolveReport broken = r;
    broken.energy_defect = std::nan("");
    EXPECT_EQ(solution_grade(sampled, broken), SolutionGrade::Mild);
    EXPECT_EQ(to_string(SolutionGrade::Classical), "CLASSICAL");
}

TEST(Residuals, OneStepDefectIsRoundoff) {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_problem(rng);
        const auto r = solve(p);
        std::vector<EdgeKernel> kernels;
        for (std::size_t j = 0; j < p.edge_count(); ++j) kernels.push_back(edge_kernel(p.operators[j], p.step_size(j)));
        EXPECT_LE(etd2_defect(p, r.solutions, kernels), 1e-11);
        EXPECT_LE(r.ode_residual, 1e-11);
        EXPECT_GE(r.ode_residual, 0.0);
    }
}

TEST(Residuals, BoundaryIdentity) {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 30; ++trial) {
        const auto r = solve(random_problem(rng));
        if (r.monodromy_rcond >= kIllConditionedRcond) EXPECT_LE(r.boundary_residual, 1e-10);
    }
}

TEST(Residuals, Uniqueness) {
    std::mt19937_64 rng(45);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_problem(rng);
        const auto mono = assemble_monodromy(p);
        const Vector f = forced_terminal_integrals(p);
        const Vector c = solve_boundary(p, mono, f);
        Vector perturbed = c;
        for (Eigen::Index i = 0; i < perturbed.size(); ++i) perturbed(i) += Complex(normal(rng), normal(rng));
        // Propagating a wrong c breaks the boundary condition; re-solving recovers c.
        const auto wrong = propagate(p, perturbed);
        EXPECT_GT(boundary_residual(p, wrong.solutions), 1e-3);
        const Vector again = solve_boundary(p, assemble_monodromy(p), forced_terminal_integrals(p));
        EXPECT_LE((again - c).norm(), 1e-10 * std::max(1.0, c.norm()));
        EXPECT_LE((minus_traces(p.graph, solve(p)) - c).norm(), 1e-10 * std::max(1.0, c.norm()));
    }
}

TEST(Residuals, EnergyIdentityFourthOrder) {
    auto p = scalar_loop(-1.0, 2.0, 1.0, 10);
    std::vector<int> steps;
    std::vector<double> defects;
    for (int n : {10, 20, 40, 80}) {
        p.steps[0] = n;
        steps.push_back(n);
        defects.push_back(solve(p).energy_defect);
    }
    EXPECT_GT(defects.front(), 0.0);
    EXPECT_NEAR(fit_order(steps, defects), 4.0, 0.3);
}

TEST(Residuals, EnergyIdentityOnRandomProblems) {
    std::mt19937_64 rng(46);
    for (int trial = 0; trial < 10; ++trial) {
        auto p = random_problem(rng, 200);
        const auto r = solve(p);
        const double scale = 1.0 + max_state(r) * max_state(r);
        EXPECT_LE(r.energy_defect / scale, 1e-6);
    }
}

TEST(Residuals, ContractiveSign) {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 30; ++trial) {
        auto p = random_problem(rng);
        for (auto& g : p.g) g.setZero();
        for (auto& f : p.forcing) f = ZeroForcing{};
        for (std::size_t j = 0; j < p.edge_count(); ++j) p.g[j] = Vector();
        // Nonzero data enters through a source edge fed by nothing but g.
        p.graph.add_edge("src", 1.0, 1);
        p.operators.push_back(scalar(-1.0));
        p.forcing.push_back(ZeroForcing{});
        p.g.push_back(vec({1.0}));
        p.steps.push_back(40);
        const Matrix dense = dense_transmission(p);
        const Matrix b = dense / std::max(1.0, operator_norm(dense));
        p.transmission = TransmissionOperator::from_dense(p.graph, b);
        const auto r = solve(p);
        const Vector plus = plus_traces(p.graph, r);
        const Complex q = plus.dot((Matrix::Identity(b.rows(), b.cols()) - b.adjoint() * b) * plus);
        EXPECT_GE(q.real(), -1e-10);
    }
}

TEST(Simpson, ExactForCubics) {
    std::vector<double> v;
    for (int k = 0; k <= 5; ++k) {
        const double t = 0.2 * k;
        v.push_back(t * t * t);
    }
    EXPECT_NEAR(composite_simpson(v, 0.2), 0.25, 1e-15);
    v.pop_back();
    EXPECT_NEAR(composite_simpson(v, 0.2), std::pow(0.8, 4) / 4, 1e-15);
}

TEST(OracleEquivalence, ScenarioSuite) {
    OracleConfig cfg;
    cfg.cn_steps_per_edge = 2000;
    for (auto id : all_scenarios()) {
        const auto doc = make_scenario(id);
        const auto& p = doc.problem;
        const auto r = solve(p);
        const auto cn = cn_solve(p, cfg);
        double a_norm = 0.0, h = 0.0;
        for (std::size_t j = 0; j < p.edge_count(); ++j) {
            a_norm = std::max(a_norm, operator_norm(p.operators[j]));
            h = std::max(h, p.graph.length(j) / cfg.cn_steps_per_edge);
        }
        const double bound = 5.0 * std::max(h * h * a_norm * a_norm * a_norm * max_state(r), 1e-9);
        double diff = 0.0;
        for (std::size_t j = 0; j < p.edge_count(); ++j) {
            const auto& s = r.solutions[j];
            for (std::size_t k = 0; k < s.states.size(); ++k)
                diff = std::max(diff, (s.states[k] - sample_on_grid(cn.solutions[j], k, s.states.size() - 1)).norm());
        }
        EXPECT_LE(diff, bound) << to_string(id);
    }
}
