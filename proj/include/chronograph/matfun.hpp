#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace chronograph {

using Complex = std::complex<double>;
/// Dense complex matrix. Real problems are stored as complex; realness is
/// checked by the mapping-property verifiers, not encoded in the type.
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Hermitian inputs may deviate from A = A* by this much, relative to ||A||.
inline constexpr double kHermitianTol = 1e-10;
/// solve_linear refuses matrices whose reciprocal condition falls below this.
inline constexpr double kSingularRcond = 1e-14;

/// e^{tA} by scaling and squaring with the degree-13 Pade approximant.
[[nodiscard]] Matrix expm(const Matrix& a, double t = 1.0);

/// e^{hA} together with phi_1(hA) = sum (hA)^k/(k+1)! and
/// phi_2(hA) = sum (hA)^k/(k+2)!, read off one exponential of the augmented
/// block matrix [[hA, I, 0], [0, 0, I], [0, 0, 0]]. Singular A needs no
/// special treatment.
struct PhiBundle {
    Matrix exp;
    Matrix phi1;
    Matrix phi2;
};

[[nodiscard]] PhiBundle phi_functions(const Matrix& a, double h);
[[nodiscard]] Matrix phi1(const Matrix& a, double h);
[[nodiscard]] Matrix phi2(const Matrix& a, double h);

struct LinearSolution {
    Matrix x;
    double rcond = 0.0;  // reciprocal 1-norm condition estimate of M
};

/// Solves M X = rhs by partially pivoted LU. Throws SingularMatrix when the
/// condition estimate drops below kSingularRcond.
[[nodiscard]] LinearSolution solve_linear(const Matrix& m, const Matrix& rhs);

/// Reciprocal 1-norm condition estimate; 0 for numerically singular input.
[[nodiscard]] double rcond_estimate(const Matrix& m);

struct HermitianEigenSystem {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // unitary, columns are eigenvectors
};

[[nodiscard]] HermitianEigenSystem hermitian_eig(const Matrix& a);

/// V diag(f(lambda)) V*.
[[nodiscard]] Matrix funm_hermitian(const HermitianEigenSystem& e,
                                    const std::function<Complex(double)>& f);

[[nodiscard]] double spectral_radius(const Matrix& a);

/// Largest singular value.
[[nodiscard]] double operator_norm(const Matrix& a);

[[nodiscard]] bool is_hermitian(const Matrix& a, double tol = kHermitianTol);

/// Block-diagonal assembly helper.
[[nodiscard]] Matrix block_diagonal(const std::vector<Matrix>& blocks);

}  // namespace chronograph
