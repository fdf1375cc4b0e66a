#include "fpt/lattice.hpp"

#include <cmath>

namespace fpt {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix pauli_x() { return (Matrix(2, 2) << 0, 1, 1, 0).finished(); }
Matrix pauli_z() { return (Matrix(2, 2) << 1, 0, 0, -1).finished(); }

} // namespace

void LatticeSpec::validate(int range_w) const {
    if (sites < 2)
        throw std::invalid_argument("LatticeSpec: need at least 2 sites");
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("LatticeSpec: eta must lie in [0, 1]");
    if (band_dim < 1)
        throw std::invalid_argument("LatticeSpec: band_dim must be positive");
    if (range_w >= 1 && sites <= range_w)
        throw std::invalid_argument("LatticeSpec: need sites > w so every hopping fits");
}

void MultiBandSpec::validate() const {
    if (range_w < 1)
        throw std::invalid_argument("MultiBandSpec: hopping range must be >= 1");
    const Eigen::Index m = a1.rows();
    auto check = [&](const Matrix& block, const char* name) {
        require_square_finite(block, name);
        if (block.rows() != m)
            throw std::invalid_argument("MultiBandSpec: all blocks must share one band dimension");
    };
    check(a1, "MultiBandSpec a1");
    check(a2, "MultiBandSpec a2");
    if (static_cast<int>(x1.size()) != range_w || static_cast<int>(x2.size()) != range_w ||
        static_cast<int>(y1.size()) != range_w || static_cast<int>(y2.size()) != range_w)
        throw std::invalid_argument("MultiBandSpec: each hopping list needs exactly range_w blocks");
    for (int r = 0; r < range_w; ++r) {
        check(x1[r], "MultiBandSpec x1");
        check(x2[r], "MultiBandSpec x2");
        check(y1[r], "MultiBandSpec y1");
        check(y2[r], "MultiBandSpec y2");
    }
}

Matrix build_shift(const LatticeSpec& spec, ShiftDirection direction, int power) {
    spec.validate(0);
    const int n = spec.sites;
    if (power < 1 || power >= n)
        throw std::invalid_argument("build_shift: power must satisfy 1 <= r < N");
    Matrix out = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        int j = i + power;
        bool wraps = j >= n;
        cplx amp = wraps ? cplx(spec.eta, 0.0) : cplx(1.0, 0.0);
        if (wraps && spec.eta == 0.0) continue;
        out(i, j % n) = amp;  // leftward shift: |j><j+r| plus eta-weighted wrap
    }
    if (direction == ShiftDirection::right) return out.transpose().eval();
    return out;
}

DrivingProtocol build_minimal(const LatticeSpec& spec, double t, double T) {
    if (!std::isfinite(t)) throw std::invalid_argument("build_minimal: t must be finite");
    if (!(T > 0.0)) throw std::invalid_argument("build_minimal: period must be positive");
    spec.validate(1);
    DrivingProtocol p;
    p.period = T;
    p.lambda = t * T / 2.0;
    p.steps = {{t * build_shift(spec, ShiftDirection::left), T / 2.0},
               {t * build_shift(spec, ShiftDirection::right), T / 2.0}};
    return p;
}

DrivingProtocol build_general(const LatticeSpec& spec, const MultiBandSpec& ansatz, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("build_general: period must be positive");
    ansatz.validate();
    spec.validate(ansatz.range_w);
    if (spec.band_dim != ansatz.band_dim())
        throw std::invalid_argument("build_general: lattice band_dim must match the ansatz blocks");

    const int n = spec.sites;
    Matrix eye_cells = Matrix::Identity(n, n);
    Matrix h1 = kron(eye_cells, ansatz.a1);
    Matrix h2 = kron(eye_cells, ansatz.a2);
    for (int r = 1; r <= ansatz.range_w; ++r) {
        Matrix lr = build_shift(spec, ShiftDirection::left, r);
        Matrix rr = build_shift(spec, ShiftDirection::right, r);
        h1 += kron(lr, ansatz.x1[r - 1]) + kron(rr, ansatz.y1[r - 1]);
        h2 += kron(lr, ansatz.x2[r - 1]) + kron(rr, ansatz.y2[r - 1]);
    }
    DrivingProtocol p;
    p.period = T;
    p.steps = {{std::move(h1), T / 2.0}, {std::move(h2), T / 2.0}};
    return p;
}

DrivingProtocol build_type1(const LatticeSpec& spec, double t, double T) {
    if (spec.band_dim != 2)
        throw std::invalid_argument("build_type1: band_dim must be 2");
    return build_general(spec, type1_ansatz(t), T);
}

DrivingProtocol build_type2(const LatticeSpec& spec, double t1, double t2, double T) {
    if (spec.band_dim != 2)
        throw std::invalid_argument("build_type2: band_dim must be 2");
    return build_general(spec, type2_ansatz(t1, t2), T);
}

MultiBandSpec minimal_ansatz(double t) {
    MultiBandSpec a;
    a.range_w = 1;
    a.a1 = Matrix::Zero(1, 1);
    a.a2 = Matrix::Zero(1, 1);
    Matrix hop = Matrix::Constant(1, 1, cplx(t, 0.0));
    Matrix zero = Matrix::Zero(1, 1);
    a.x1 = {hop};
    a.y1 = {zero};
    a.x2 = {zero};
    a.y2 = {hop};
    return a;
}

MultiBandSpec type1_ansatz(double t) {
    Matrix b = t * pauli_x() + pauli_z();
    Matrix zero = Matrix::Zero(2, 2);
    MultiBandSpec a;
    a.range_w = 1;
    a.a1 = 1.5 * b;
    a.a2 = 1.5 * b;
    a.x1 = {b};
    a.y1 = {zero};
    a.x2 = {zero};
    a.y2 = {b};
    return a;
}

MultiBandSpec type2_ansatz(double t1, double t2) {
    Matrix s0 = Matrix::Identity(2, 2);
    cplx plus(1.0, 1.0), minus(1.0, -1.0);
    Matrix hop1_fwd = t1 * (s0 + plus * pauli_x());
    Matrix hop1_bwd = t1 * (s0 + minus * pauli_x());
    Matrix hop2_fwd = t2 * (s0 + plus * pauli_z());
    Matrix hop2_bwd = t2 * (s0 + minus * pauli_z());
    MultiBandSpec a;
    a.range_w = 2;
    a.a1 = Matrix::Zero(2, 2);
    a.a2 = Matrix::Zero(2, 2);
    a.x1 = {hop1_fwd, hop2_fwd};  // step 1 carries (1+i) on both distances
    a.y1 = {hop1_fwd, hop2_fwd};
    a.x2 = {hop1_bwd, hop2_bwd};
    a.y2 = {hop1_bwd, hop2_bwd};
    return a;
}

Matrix bloch_hamiltonian(const MultiBandSpec& ansatz, int which, double k) {
    ansatz.validate();
    if (which != 1 && which != 2)
        throw std::invalid_argument("bloch_hamiltonian: which must be 1 or 2");
    const auto& a = which == 1 ? ansatz.a1 : ansatz.a2;
    const auto& x = which == 1 ? ansatz.x1 : ansatz.x2;
    const auto& y = which == 1 ? ansatz.y1 : ansatz.y2;
    Matrix h = a;
    for (int r = 1; r <= ansatz.range_w; ++r) {
        cplx phase = std::exp(cplx(0.0, k * r));
        h += phase * x[r - 1] + std::conj(phase) * y[r - 1];
    }
    return h;
}

} // namespace fpt
