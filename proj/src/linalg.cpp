#include "fpt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

// The system lapacke.h defaults to C99 _Complex; point it at std::complex
// so Eigen buffers can be passed straight through.
#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace fpt {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
// Above this eigenvector conditioning the eigendecomposition-based logarithm
// loses too many digits and the Schur-based algorithm takes over.
constexpr double kLogCondSwitch = 1e8;

// LU inverse through LAPACK; sets *singular instead of throwing.
Matrix inverse_lu(const Matrix& m, bool* singular) {
    Matrix a = m;
    lapack_int n = static_cast<lapack_int>(a.rows());
    std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
    lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, a.data(), n, ipiv.data());
    if (info > 0) {
        *singular = true;
        return Matrix();
    }
    if (info < 0) throw std::logic_error("zgetrf: invalid argument");
    info = LAPACKE_zgetri(LAPACK_COL_MAJOR, n, a.data(), n, ipiv.data());
    if (info > 0) {
        *singular = true;
        return Matrix();
    }
    if (info < 0) throw std::logic_error("zgetri: invalid argument");
    *singular = false;
    return a;
}

// Principal-branch argument normalized to (-pi, pi]: std::arg can return
// exactly -pi for negative reals with a signed-zero imaginary part, which
// would otherwise leak a quasienergy onto the excluded +pi/T zone edge.
double principal_arg(cplx z) {
    double a = std::arg(z);
    if (a <= -kPi) a = kPi;
    return a;
}

// Exact exponential of a matrix whose only nonzero entries form one constant
// off-diagonal (the shift-power generators): the series terminates and each
// surviving diagonal k holds c^k / k!.
bool try_single_diagonal_exp(const Matrix& m, Matrix* out) {
    const Eigen::Index n = m.rows();
    Eigen::Index offset = 0;  // signed diagonal index, 0 = main
    cplx value = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            cplx e = m(i, j);
            if (e == 0.0) continue;
            Eigen::Index d = j - i;
            if (d == 0) return false;           // has a main-diagonal entry
            if (offset == 0) {
                offset = d;
                value = e;
            } else if (d != offset || e != value) {
                return false;                   // second diagonal or non-constant
            }
        }
    }
    if (offset == 0) return false;  // zero matrix; handled by the caller
    *out = Matrix::Identity(n, n);
    cplx coeff = 1.0;
    for (Eigen::Index k = 1; k * std::abs(offset) < n; ++k) {
        coeff *= value / static_cast<double>(k);
        Eigen::Index d = k * offset;
        for (Eigen::Index i = std::max<Eigen::Index>(0, -d); i + std::max<Eigen::Index>(0, d) < n; ++i)
            (*out)(i, i + d) = coeff;
    }
    return true;
}

bool strictly_triangular(const Matrix& m, bool upper) {
    const Eigen::Index n = m.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            bool zero_region = upper ? (j <= i) : (j >= i);
            if (zero_region && m(i, j) != 0.0) return false;
        }
    return true;
}

} // namespace

EigDecomposition eig_general(const Matrix& m) {
    require_square_finite(m, "eig_general");
    const lapack_int n = static_cast<lapack_int>(m.rows());
    Matrix a = m;  // zgeev overwrites its input
    Vector w(n);
    Matrix vr(n, n);
    lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n,
                                    w.data(), nullptr, 1, vr.data(), n);
    if (info > 0)
        throw NumericalError("eig_general: QR iteration failed to converge");
    if (info < 0) throw std::logic_error("zgeev: invalid argument");

    EigDecomposition out;
    out.eigenvalues = std::move(w);
    out.right_eigenvectors = std::move(vr);

    // Residuals against the untouched input; the denominator guards the
    // zero matrix, whose pairs are exact.
    double mnorm = m.norm();
    double denom = mnorm > 0 ? mnorm : 1.0;
    Matrix defect = m * out.right_eigenvectors
                  - out.right_eigenvectors * out.eigenvalues.asDiagonal();
    out.residuals = defect.colwise().norm().transpose() / denom;
    out.condition_estimate = condition_estimate(out.right_eigenvectors);
    return out;
}

Vector eigenvalues_only(const Matrix& m) {
    require_square_finite(m, "eigenvalues_only");
    const lapack_int n = static_cast<lapack_int>(m.rows());
    Matrix a = m;
    Vector w(n);
    lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n,
                                    w.data(), nullptr, 1, nullptr, 1);
    if (info > 0)
        throw NumericalError("eigenvalues_only: QR iteration failed to converge");
    if (info < 0) throw std::logic_error("zgeev: invalid argument");
    return w;
}

double condition_estimate(const Matrix& w) {
    require_square_finite(w, "condition_estimate");
    bool singular = false;
    Matrix inv = inverse_lu(w, &singular);
    if (singular) return std::numeric_limits<double>::infinity();
    return w.norm() * inv.norm();
}

double operator_norm_2(const Matrix& m) {
    require_square_finite(m, "operator_norm_2");
    const Eigen::Index n = m.rows();
    if (m.isZero(0.0)) return 0.0;
    // Deterministic power iteration on m^dag m.
    Vector v = Vector::Constant(n, cplx(1.0, 0.0));
    v /= v.norm();
    double prev = 0.0;
    for (int it = 0; it < 500; ++it) {
        Vector u = m.adjoint() * (m * v);
        double norm = u.norm();
        if (norm == 0.0) return 0.0;  // v fell entirely into the null space
        v = u / norm;
        double est = std::sqrt(norm);
        if (it > 2 && std::abs(est - prev) <= 1e-13 * est) return est;
        prev = est;
    }
    return prev;
}

Matrix mat_exp(const Matrix& m) {
    require_square_finite(m, "mat_exp");
    const Eigen::Index n = m.rows();
    Matrix result;

    if (m.isZero(0.0)) {
        result = Matrix::Identity(n, n);
    } else if (m.isDiagonal(0.0)) {
        result = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) result(i, i) = std::exp(m(i, i));
    } else if (try_single_diagonal_exp(m, &result)) {
        // handled
    } else if (n <= 256 && (strictly_triangular(m, true) || strictly_triangular(m, false))) {
        // Nilpotent: the Taylor series terminates within n terms.
        result = Matrix::Identity(n, n);
        Matrix term = Matrix::Identity(n, n);
        for (Eigen::Index k = 1; k <= n; ++k) {
            term = (m * term) / static_cast<double>(k);
            if (term.isZero(0.0)) break;
            result += term;
        }
    } else {
        result = m.exp();  // scaling-and-squaring Pade
    }

    if (!result.allFinite())
        throw NumericalError("mat_exp: overflow (operator norm too large)");
    return result;
}

UnitaryLog log_from_decomposition(const EigDecomposition& eig, const Matrix& u, double period) {
    if (period <= 0.0) throw std::invalid_argument("mat_log_unitary: period must be positive");
    const Eigen::Index n = eig.eigenvalues.size();

    double max_abs = eig.eigenvalues.cwiseAbs().maxCoeff();
    double min_abs = eig.eigenvalues.cwiseAbs().minCoeff();
    if (min_abs <= 1e-14 * std::max(1.0, max_abs))
        throw NumericalError("mat_log_unitary: operator is numerically singular");

    UnitaryLog out;
    out.branch_flags.resize(static_cast<std::size_t>(n));
    Vector log_eigs(n);
    const double guard = tolerances().branch_guard;
    for (Eigen::Index i = 0; i < n; ++i) {
        cplx xi = eig.eigenvalues(i);
        // principal_arg yields (-pi, pi], so an exactly-on-cut eigenvalue
        // lands on +pi and its quasienergy on the -pi/period zone edge.
        double a = principal_arg(xi);
        out.branch_flags[static_cast<std::size_t>(i)] = std::abs(std::abs(a) - kPi) <= guard;
        log_eigs(i) = cplx(0.0, 1.0) * cplx(std::log(std::abs(xi)), a) / period;
    }

    if (eig.condition_estimate <= kLogCondSwitch) {
        bool singular = false;
        Matrix winv = inverse_lu(eig.right_eigenvectors, &singular);
        if (!singular) {
            out.h = eig.right_eigenvectors * log_eigs.asDiagonal() * winv;
            return out;
        }
    }
    // Near-defective: Schur-form logarithm, same principal branch.
    out.h = (cplx(0.0, 1.0) / period) * u.log();
    return out;
}

UnitaryLog mat_log_unitary(const Matrix& u, double period) {
    require_square_finite(u, "mat_log_unitary");
    return log_from_decomposition(eig_general(u), u, period);
}

} // namespace fpt
