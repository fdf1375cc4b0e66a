#include "fpt/symmetry.hpp"

#include <cmath>
#include <stdexcept>

#include "fpt/floquet.hpp"
#include "fpt/linalg.hpp"

namespace fpt {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix comm(const Matrix& a, const Matrix& b) { return a * b - b * a; }

// Largest Frobenius norm among the hopping blocks; reference scale for the
// "is this block zero" decisions below.
double hopping_scale(const MultiBandSpec& ansatz) {
    double s = 0.0;
    for (const auto* list : {&ansatz.x1, &ansatz.x2, &ansatz.y1, &ansatz.y2})
        for (const Matrix& m : *list) s = std::max(s, m.norm());
    return s;
}

} // namespace

PTOperators PTOperators::reflection(int sites, int band_dim) {
    if (sites < 1 || band_dim < 1)
        throw std::invalid_argument("PTOperators::reflection: need positive sites and band_dim");
    Matrix cells = Matrix::Zero(sites, sites);
    for (int j = 0; j < sites; ++j) cells(j, sites - 1 - j) = 1.0;
    PTOperators pt;
    pt.parity = kron(cells, Matrix::Identity(band_dim, band_dim));
    return pt;
}

PTOperators PTOperators::identity(int dim) {
    if (dim < 1) throw std::invalid_argument("PTOperators::identity: need positive dim");
    PTOperators pt;
    pt.parity = Matrix::Identity(dim, dim);
    return pt;
}

void PTOperators::validate() const {
    require_square_finite(parity, "PTOperators::validate");
    if (parity.imag().cwiseAbs().maxCoeff() > 0.0)
        throw std::invalid_argument("PTOperators: parity must be real-valued");
    const double n = parity.rows();
    if ((parity * parity - Matrix::Identity(parity.rows(), parity.cols())).norm() > 1e-12 * n)
        throw std::invalid_argument("PTOperators: parity must square to the identity");
}

CheckResult check_pt_protocol(const DrivingProtocol& p, const PTOperators& pt) {
    p.validate();
    pt.validate();
    if (p.steps.size() != 2)
        throw std::invalid_argument("check_pt_protocol: expects a two-step protocol");
    if (pt.parity.rows() != p.dim())
        throw std::invalid_argument("check_pt_protocol: parity dimension mismatch");
    const Matrix& h1 = p.steps[0].h;
    const Matrix& h2 = p.steps[1].h;
    CheckResult r;
    r.defect = (pt.parity * h1.conjugate() * pt.parity - h2).norm();
    r.pass = r.defect <= 1e-12;
    return r;
}

CheckResult check_pt_of_floquet(const Matrix& u_f, const PTOperators& pt) {
    require_square_finite(u_f, "check_pt_of_floquet");
    pt.validate();
    if (pt.parity.rows() != u_f.rows())
        throw std::invalid_argument("check_pt_of_floquet: parity dimension mismatch");
    // P conj(U) P = U^{-1} is tested multiplicatively so U need not be
    // inverted; a genuinely singular U cannot satisfy it and fails by norm.
    CheckResult r;
    r.defect = (pt.parity * u_f.conjugate() * pt.parity * u_f
                - Matrix::Identity(u_f.rows(), u_f.cols())).norm();
    r.pass = r.defect <= 1e-9;
    return r;
}

BlochConditionReport check_bloch_conditions(const MultiBandSpec& ansatz, int k_samples) {
    ansatz.validate();
    if (k_samples < 2 * ansatz.range_w + 1)
        throw std::invalid_argument("check_bloch_conditions: need at least 2w+1 k-samples");
    BlochConditionReport rep;
    rep.k_samples = k_samples;
    for (int i = 0; i < k_samples; ++i) {
        const double k = -M_PI + 2.0 * M_PI * i / k_samples;
        Matrix h1 = bloch_hamiltonian(ansatz, 1, k);
        Matrix h2 = bloch_hamiltonian(ansatz, 2, k);
        Matrix sum = h1 + h2;
        rep.max_hermitian_defect =
            std::max(rep.max_hermitian_defect, (sum - sum.adjoint().eval()).norm());
        rep.max_commutator_norm = std::max(rep.max_commutator_norm, comm(h1, h2).norm());
    }
    rep.hermitian_sum_pass = rep.max_hermitian_defect <= 1e-12;
    rep.commute_pass = rep.max_commutator_norm <= 1e-12;
    return rep;
}

ObstructionReport check_obstructions(const MultiBandSpec& ansatz) {
    ansatz.validate();
    const double thresh = 1e-12 * std::max(1.0, hopping_scale(ansatz));
    ObstructionReport rep;
    for (int r = 1; r <= ansatz.range_w; ++r) {
        for (int rp = 1; rp <= ansatz.range_w; ++rp) {
            ObstructionFlags f;
            f.r = r;
            f.rp = rp;
            const Matrix& x1 = ansatz.x1[r - 1];
            const Matrix& y1 = ansatz.y1[r - 1];
            const Matrix& x2 = ansatz.x2[rp - 1];
            const Matrix& y2 = ansatz.y2[rp - 1];
            f.xy_commutator = comm(x1, y2).norm() > thresh;
            f.yx_commutator = comm(y1, x2).norm() > thresh;
            f.product_difference = (y2 * x1 - x2 * y1).norm() > thresh;
            rep.any = rep.any || f.xy_commutator || f.yx_commutator || f.product_difference;
            rep.entries.push_back(f);
        }
    }
    return rep;
}

CommutatorSplit commutator_decompose(const MultiBandSpec& ansatz, const LatticeSpec& spec) {
    ansatz.validate();
    spec.validate(ansatz.range_w);
    if (spec.eta != 0.0)
        throw std::invalid_argument("commutator_decompose: defined for open boundaries (eta = 0)");
    if (spec.band_dim != ansatz.band_dim())
        throw std::invalid_argument("commutator_decompose: band_dim mismatch");
    const int w = ansatz.range_w;
    const int n = spec.sites;
    if (n <= 2 * w)
        throw std::invalid_argument(
            "commutator_decompose: need N > 2w so the boundary regions do not overlap");

    // Shift powers L^r, R^r for r = 0..2w (identity at r = 0).
    std::vector<Matrix> lp(2 * w + 1), rp(2 * w + 1);
    lp[0] = rp[0] = Matrix::Identity(n, n);
    for (int r = 1; r <= 2 * w; ++r) {
        lp[r] = build_shift(spec, ShiftDirection::left, r);
        rp[r] = build_shift(spec, ShiftDirection::right, r);
    }

    const auto& a1 = ansatz.a1;
    const auto& a2 = ansatz.a2;
    auto x1 = [&](int r) -> const Matrix& { return ansatz.x1[r - 1]; };
    auto x2 = [&](int r) -> const Matrix& { return ansatz.x2[r - 1]; };
    auto y1 = [&](int r) -> const Matrix& { return ansatz.y1[r - 1]; };
    auto y2 = [&](int r) -> const Matrix& { return ansatz.y2[r - 1]; };

    // Bulk part: every term is (shift power) x (band commutator), exactly the
    // Fourier modes of [h_1(k), h_2(k)]; it vanishes iff the Bloch blocks
    // commute at every k.
    Matrix g1 = kron(Matrix::Identity(n, n), comm(a1, a2));
    for (int r = 1; r <= w; ++r) {
        g1 += kron(lp[r], comm(a1, x2(r)) - comm(a2, x1(r)));
        g1 += kron(rp[r], comm(a1, y2(r)) - comm(a2, y1(r)));
    }
    for (int a = 1; a <= w; ++a)
        for (int b = 1; b <= w; ++b) {
            g1 += kron(lp[a + b], comm(x1(a), x2(b)));
            g1 += kron(rp[a + b], comm(y1(a), y2(b)));
        }
    for (int nn = 1; nn <= w; ++nn)
        for (int m = 1; m <= nn; ++m)
            g1 += kron(lp[nn - m], comm(x1(nn), y2(m)) + comm(y1(m), x2(nn)));
    for (int nn = 1; nn <= w; ++nn)
        for (int m = 1; m < nn; ++m)
            g1 += kron(rp[nn - m], comm(y1(nn), x2(m)) + comm(x1(m), y2(nn)));

    // Boundary part: differences between composed shifts and the bare power
    // they equal in the bulk (L^n R^m vs L^{n-m}), plus the corner
    // commutators [L^a, R^b]. All supported within 2w cells of the ends.
    Matrix g2 = Matrix::Zero(n * ansatz.band_dim(), n * ansatz.band_dim());
    for (int nn = 1; nn <= w; ++nn)
        for (int m = 1; m <= nn; ++m) {
            g2 += kron((lp[nn] * rp[m] - lp[nn - m]).eval(), comm(x1(nn), y2(m)));
            g2 += kron((rp[nn] * lp[m] - rp[nn - m]).eval(), comm(y1(nn), x2(m)));
        }
    for (int nn = 1; nn <= w; ++nn)
        for (int m = 1; m < nn; ++m) {
            g2 += kron((lp[m] * rp[nn] - rp[nn - m]).eval(), comm(x1(m), y2(nn)));
            g2 += kron((rp[m] * lp[nn] - lp[nn - m]).eval(), comm(y1(m), x2(nn)));
        }
    for (int a = 1; a <= w; ++a)
        for (int b = 1; b <= w; ++b) {
            g2 += kron(comm(lp[a], rp[b]), (y2(b) * x1(a)).eval());
            g2 -= kron(comm(lp[b], rp[a]), (x2(b) * y1(a)).eval());
        }

    return {std::move(g1), std::move(g2)};
}

AuditReport audit_model(const MultiBandSpec& ansatz, const LatticeSpec& spec,
                        const PTOperators& pt, double T) {
    AuditReport rep;
    DrivingProtocol p = build_general(spec, ansatz, T);
    rep.pt_protocol = check_pt_protocol(p, pt);
    rep.pt_floquet = check_pt_of_floquet(evolve_protocol(p), pt);
    rep.bloch = check_bloch_conditions(ansatz, 4 * ansatz.range_w + 1);
    rep.obstructions = check_obstructions(ansatz);

    LatticeSpec open = spec;
    open.eta = 0.0;
    DrivingProtocol po = build_general(open, ansatz, T);
    rep.obc_commutator_norm = comm(po.steps[0].h, po.steps[1].h).norm();
    rep.obc_noncommute =
        rep.obc_commutator_norm > 1e-12 * std::max(1.0, hopping_scale(ansatz));

    auto split = commutator_decompose(ansatz, open);
    rep.g1_norm = split.g1.norm();
    rep.g2_norm = split.g2.norm();
    return rep;
}

} // namespace fpt
