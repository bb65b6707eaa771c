#pragma once

#include <string>
#include <vector>

#include "chronograph/problem.hpp"

namespace chronograph::testing {

inline Matrix scalar(Complex x) { return Matrix::Constant(1, 1, x); }
inline Vector vec(std::initializer_list<Complex> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (auto x : xs) v(i++) = x;
    return v;
}

/// n scalar edges e0..e{n-1} with A = a, f = f, no coupling, zero g.
inline TimeGraphProblem scalar_problem(std::size_t n, Complex a, Complex f, int steps = 100, double length = 1.0) {
    TimeGraphProblem p;
    for (std::size_t j = 0; j < n; ++j) {
        p.graph.add_edge("e" + std::to_string(j), length, 1);
        p.operators.push_back(scalar(a));
        p.forcing.push_back(f == Complex(0.0) ? ForcingTerm{ZeroForcing{}} : ForcingTerm{ConstantForcing{vec({f})}});
        p.steps.push_back(steps);
    }
    p.g.assign(n, Vector());
    return p;
}

/// Single scalar edge with A = a, f = f and B = [b].
inline TimeGraphProblem scalar_loop(Complex a, Complex b, Complex f, int steps = 100, double length = 1.0) {
    auto p = scalar_problem(1, a, f, steps, length);
    p.transmission.set_block(0, 0, scalar(b));
    return p;
}

}  // namespace chronograph::testing
