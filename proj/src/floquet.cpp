#include "fpt/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fpt {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

Matrix evolve_protocol(const DrivingProtocol& p) {
    p.validate();
    const Eigen::Index n = p.steps.front().h.rows();
    Matrix u = Matrix::Identity(n, n);
    // First step leftmost: U = exp(-i h_1 d_1) exp(-i h_2 d_2) ...
    for (const Step& s : p.steps)
        u = u * mat_exp(cplx(0.0, -s.duration) * s.h);
    return u;
}

FloquetResult extract_hf(const Matrix& u_f, double T) {
    require_square_finite(u_f, "extract_hf");
    if (!(T > 0.0)) throw std::invalid_argument("extract_hf: period must be positive");

    EigDecomposition eig = eig_general(u_f);
    UnitaryLog log = log_from_decomposition(eig, u_f, T);
    const Eigen::Index n = eig.eigenvalues.size();

    Vector energies(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        cplx xi = eig.eigenvalues(i);
        double a = std::arg(xi);
        if (a <= -kPi) a = kPi;  // cut convention: Re E lands on -pi/T, not +pi/T
        energies(i) = cplx(0.0, 1.0) * cplx(std::log(std::abs(xi)), a) / T;
    }

    // Deterministic order: ascending Re E, ties by ascending Im E.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        double ra = energies(a).real(), rb = energies(b).real();
        if (ra != rb) return ra < rb;
        return energies(a).imag() < energies(b).imag();
    });

    FloquetResult out;
    out.u_f = u_f;
    out.h_f = std::move(log.h);
    out.quasienergies.resize(n);
    out.floquet_eigs.resize(n);
    out.eigvecs.resize(n, n);
    out.branch_flags.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index s = order[static_cast<std::size_t>(i)];
        out.quasienergies(i) = energies(s);
        out.floquet_eigs(i) = eig.eigenvalues(s);
        out.eigvecs.col(i) = eig.right_eigenvectors.col(s);
        out.branch_flags[static_cast<std::size_t>(i)] =
            log.branch_flags[static_cast<std::size_t>(s)];
    }
    out.residual_max = eig.residuals.size() ? eig.residuals.maxCoeff() : 0.0;
    out.condition_estimate = eig.condition_estimate;
    return out;
}

FloquetResult floquet_of(const DrivingProtocol& p) {
    return extract_hf(evolve_protocol(p), p.period);
}

Vector pbc_quasienergies_minimal(int N, double lambda, double T) {
    if (N < 2) throw std::invalid_argument("pbc_quasienergies_minimal: N must be >= 2");
    if (!(T > 0.0)) throw std::invalid_argument("pbc_quasienergies_minimal: period must be positive");
    Vector e(N);
    for (int n = 0; n < N; ++n) {
        double k = 2.0 * kPi * n / N;
        e(n) = fold_quasienergy(2.0 * lambda / T * std::cos(k), T);
    }
    return e;
}

Matrix averaged_hamiltonian(const DrivingProtocol& p) {
    p.validate();
    const Eigen::Index n = p.steps.front().h.rows();
    Matrix h0 = Matrix::Zero(n, n);
    for (const Step& s : p.steps) h0 += s.h * s.duration;
    return h0 / p.period;
}

double fold_quasienergy(double e, double T) {
    const double half = kPi / T;
    double y = std::fmod(e + half, 2.0 * half);
    if (y < 0.0) y += 2.0 * half;
    double out = y - half;
    if (out >= half) out -= 2.0 * half;  // rounding guard: keep [-pi/T, pi/T)
    return out;
}

} // namespace fpt
