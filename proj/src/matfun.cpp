#include "chronograph/matfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "chronograph/errors.hpp"

namespace chronograph {

namespace {

void require_square(const Matrix& a, const char* who) {
    if (a.rows() != a.cols()) throw DimensionError(std::string(who) + ": matrix is not square");
}

// Higham (2005) degree-13 Pade coefficients and the matching scaling threshold.
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

Matrix expm(const Matrix& a, double t) {
    require_square(a, "expm");
    if (!std::isfinite(t)) throw std::invalid_argument("expm: non-finite time");
    const Eigen::Index n = a.rows();
    const Matrix id = Matrix::Identity(n, n);
    if (n == 0) return id;

    Matrix x = t * a;
    const double norm = x.cwiseAbs().colwise().sum().maxCoeff();
    if (norm == 0.0) return id;
    int squarings = 0;
    if (norm > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
    if (squarings > 0) x /= std::ldexp(1.0, squarings);

    const Matrix x2 = x * x;
    const Matrix x4 = x2 * x2;
    const Matrix x6 = x4 * x2;
    const auto& b = kPade13;
    const Matrix inner_u = x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2);
    const Matrix u = x * (inner_u + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id);
    const Matrix inner_v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2);
    const Matrix v = inner_v + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;

    Matrix r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < squarings; ++k) r = r * r;
    return r;
}

PhiBundle phi_functions(const Matrix& a, double h) {
    require_square(a, "phi_functions");
    const Eigen::Index n = a.rows();
    Matrix aug = Matrix::Zero(3 * n, 3 * n);
    aug.block(0, 0, n, n) = h * a;
    aug.block(0, n, n, n).setIdentity();
    aug.block(n, 2 * n, n, n).setIdentity();
    const Matrix e = expm(aug);
    return {e.block(0, 0, n, n), e.block(0, n, n, n), e.block(0, 2 * n, n, n)};
}

Matrix phi1(const Matrix& a, double h) { return phi_functions(a, h).phi1; }
Matrix phi2(const Matrix& a, double h) { return phi_functions(a, h).phi2; }

double rcond_estimate(const Matrix& m) {
    require_square(m, "rcond_estimate");
    if (m.rows() == 0) return 1.0;
    if (!m.allFinite()) return 0.0;
    const double rc = m.partialPivLu().rcond();
    return std::isfinite(rc) ? rc : 0.0;
}

LinearSolution solve_linear(const Matrix& m, const Matrix& rhs) {
    require_square(m, "solve_linear");
    if (rhs.rows() != m.rows()) throw DimensionError("solve_linear: rhs row count mismatch");
    if (m.rows() == 0) return {rhs, 1.0};
    Eigen::PartialPivLU<Matrix> lu(m);
    double rc = lu.rcond();
    if (!std::isfinite(rc)) rc = 0.0;
    if (rc < kSingularRcond) throw SingularMatrix("solve_linear: matrix is numerically singular", rc);
    return {lu.solve(rhs), rc};
}

bool is_hermitian(const Matrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = a.norm();
    return (a - a.adjoint()).norm() <= tol * scale;
}

HermitianEigenSystem hermitian_eig(const Matrix& a) {
    require_square(a, "hermitian_eig");
    if (!is_hermitian(a)) throw NotHermitian("hermitian_eig: matrix is not Hermitian");
    const Matrix sym = (a + a.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() != Eigen::Success) throw Error("hermitian_eig: decomposition failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

Matrix funm_hermitian(const HermitianEigenSystem& e, const std::function<Complex(double)>& f) {
    Vector fl(e.eigenvalues.size());
    for (Eigen::Index k = 0; k < fl.size(); ++k) fl(k) = f(e.eigenvalues(k));
    return e.eigenvectors * fl.asDiagonal() * e.eigenvectors.adjoint();
}

double spectral_radius(const Matrix& a) {
    require_square(a, "spectral_radius");
    if (a.rows() == 0) return 0.0;
    Eigen::ComplexEigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw Error("spectral_radius: eigenvalue iteration failed");
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double operator_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

Matrix block_diagonal(const std::vector<Matrix>& blocks) {
    Eigen::Index rows = 0, cols = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    Matrix out = Matrix::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

}  // namespace chronograph
