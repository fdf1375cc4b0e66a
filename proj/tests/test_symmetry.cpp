// test_symmetry.cpp — PT construction checks and the commutator decomposition

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fpt/floquet.hpp"
#include "fpt/lattice.hpp"
#include "fpt/symmetry.hpp"
#include "fpt/types.hpp"

using namespace fpt;

namespace {

Matrix random_block(int m, std::mt19937& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix b(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) b(i, j) = cplx(g(rng), g(rng));
    return b / b.norm();
}

// Arbitrary two-step ansatz with m-by-m blocks and range w.
MultiBandSpec random_ansatz(int m, int w, unsigned seed) {
    std::mt19937 rng(seed);
    MultiBandSpec a;
    a.range_w = w;
    a.a1 = random_block(m, rng);
    a.a2 = random_block(m, rng);
    for (int r = 0; r < w; ++r) {
        a.x1.push_back(random_block(m, rng));
        a.x2.push_back(random_block(m, rng));
        a.y1.push_back(random_block(m, rng));
        a.y2.push_back(random_block(m, rng));
    }
    return a;
}

// All blocks are polynomials in one shared Hermitian matrix, so every pair of
// Bloch blocks commutes at every k.
MultiBandSpec commuting_ansatz(int m, int w, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix b(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) b(i, j) = cplx(g(rng), g(rng));
    b = Matrix(0.5 * (b + b.adjoint()));
    auto poly = [&]() {
        Matrix p = Matrix::Zero(m, m);
        Matrix power = Matrix::Identity(m, m);
        for (int d = 0; d < m; ++d) {
            p += cplx(g(rng), g(rng)) * power;
            power = power * b;
        }
        return Matrix(p / p.norm());
    };
    MultiBandSpec a;
    a.range_w = w;
    a.a1 = poly();
    a.a2 = poly();
    for (int r = 0; r < w; ++r) {
        a.x1.push_back(poly());
        a.x2.push_back(poly());
        a.y1.push_back(poly());
        a.y2.push_back(poly());
    }
    return a;
}

Matrix obc_commutator(const MultiBandSpec& a, int n) {
    const DrivingProtocol p = build_general(LatticeSpec{n, 0.0, a.band_dim()}, a, 1.0);
    return p.steps[0].h * p.steps[1].h - p.steps[1].h * p.steps[0].h;
}

} // namespace

TEST_CASE("reflection parity reverses cells and squares to identity") {
    const PTOperators pt = PTOperators::reflection(4, 2);
    pt.validate();
    CHECK((pt.parity * pt.parity - Matrix::Identity(8, 8)).norm() == 0.0);
    // |cell 1, band b> -> |cell 4, band b>
    CHECK(pt.parity(6, 0) == cplx(1, 0));
    CHECK(pt.parity(7, 1) == cplx(1, 0));
    CHECK(pt.parity(0, 6) == cplx(1, 0));

    PTOperators bad{Matrix::Identity(3, 3) * 2.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    PTOperators imag{cplx(0, 1) * Matrix::Identity(2, 2)};
    CHECK_THROWS_AS(imag.validate(), std::invalid_argument);
}

TEST_CASE("the minimal model is PT symmetric under reflection at every eta") {
    for (double eta : {0.0, 0.4, 1.0}) {
        const DrivingProtocol p =
            build_minimal(LatticeSpec{6, eta, 1}, 2.0, 1.0);
        const PTOperators pt = PTOperators::reflection(6, 1);
        const CheckResult protocol = check_pt_protocol(p, pt);
        CHECK(protocol.pass);
        CHECK(protocol.defect < 1e-14);
        // The composed-evolution condition holds even deep in the broken phase.
        const CheckResult evo = check_pt_of_floquet(evolve_protocol(p), pt);
        CHECK(evo.pass);
        CHECK(evo.defect < 1e-9);
    }
}

TEST_CASE("perturbing one step breaks the protocol condition") {
    DrivingProtocol p = build_minimal(LatticeSpec{6, 0.0, 1}, 2.0, 1.0);
    p.steps[1].h(2, 2) += 0.1;
    const CheckResult r = check_pt_protocol(p, PTOperators::reflection(6, 1));
    CHECK_FALSE(r.pass);
    CHECK(r.defect > 0.05);
}

TEST_CASE("check_pt_of_floquet flags an asymmetric evolution") {
    Matrix u = Matrix::Zero(2, 2);
    u(0, 0) = 2.0;
    u(1, 1) = 1.0;
    const CheckResult r = check_pt_of_floquet(u, PTOperators::identity(2));
    CHECK_FALSE(r.pass);
}

TEST_CASE("type2 under identity parity passes all construction conditions") {
    const MultiBandSpec a = type2_ansatz(1.0, 0.5);
    const DrivingProtocol p = build_general(LatticeSpec{8, 0.0, 2}, a, 1.0);
    const PTOperators pt = PTOperators::identity(16);
    CHECK(check_pt_protocol(p, pt).pass);
    CHECK(check_pt_of_floquet(evolve_protocol(p), pt).pass);
    const BlochConditionReport bloch = check_bloch_conditions(a, 9);
    CHECK(bloch.pass());
    CHECK(bloch.max_hermitian_defect < 1e-13);
    CHECK(bloch.max_commutator_norm < 1e-13);
    CHECK(bloch.k_samples == 9);
}

TEST_CASE("type1 passes Bloch conditions; a detuned copy fails them") {
    MultiBandSpec a = type1_ansatz(1.5);
    CHECK(check_bloch_conditions(a, 5).pass());
    a.x2[0](0, 0) += 0.3;  // now h1 + h2 is not Hermitian and blocks differ
    const BlochConditionReport r = check_bloch_conditions(a, 5);
    CHECK_FALSE(r.hermitian_sum_pass);
    CHECK_FALSE(r.pass());
}

TEST_CASE("check_bloch_conditions enforces the minimum grid") {
    CHECK_THROWS_AS(check_bloch_conditions(type2_ansatz(1.0, 0.5), 4),
                    std::invalid_argument);
}

TEST_CASE("obstruction flags: minimal and type1 fire product difference only") {
    for (const MultiBandSpec& a : {minimal_ansatz(1.7), type1_ansatz(2.0)}) {
        const ObstructionReport rep = check_obstructions(a);
        REQUIRE(rep.entries.size() == 1);
        CHECK_FALSE(rep.entries[0].xy_commutator);
        CHECK_FALSE(rep.entries[0].yx_commutator);
        CHECK(rep.entries[0].product_difference);
        CHECK(rep.any);
    }
}

TEST_CASE("obstruction flags: type2 fires cross-distance commutators only") {
    const ObstructionReport rep = check_obstructions(type2_ansatz(1.0, 0.5));
    REQUIRE(rep.entries.size() == 4);
    for (const auto& e : rep.entries) {
        const bool cross = e.r != e.rp;
        CHECK(e.xy_commutator == cross);
        CHECK(e.yx_commutator == cross);
        CHECK_FALSE(e.product_difference);
    }
    CHECK(rep.any);
}

TEST_CASE("a commuting family raises no obstruction") {
    // Single hopping each way with identical blocks: Y2 X1 = X2 Y1.
    MultiBandSpec a = minimal_ansatz(1.0);
    a.y1[0] = a.x1[0];
    a.x2[0] = a.y2[0];
    const ObstructionReport rep = check_obstructions(a);
    CHECK_FALSE(rep.any);
}

TEST_CASE("minimal-model decomposition: G1 vanishes, G2 is the corner term") {
    const double t = 1.5;
    const MultiBandSpec a = minimal_ansatz(t);
    const LatticeSpec spec{8, 0.0, 1};
    const CommutatorSplit split = commutator_decompose(a, spec);
    CHECK(split.g1.norm() < 1e-14);
    Matrix corner = Matrix::Zero(8, 8);
    corner(0, 0) = t * t;
    corner(7, 7) = -t * t;
    CHECK((split.g2 - corner).norm() < 1e-13);
}

TEST_CASE("decomposition reproduces the direct commutator on random ansatz") {
    for (unsigned seed : {1u, 2u, 3u, 4u}) {
        const int m = 1 + static_cast<int>(seed % 3);
        const int w = 1 + static_cast<int>(seed % 2);
        const MultiBandSpec a = random_ansatz(m, w, 100 + seed);
        const LatticeSpec spec{12, 0.0, m};
        const CommutatorSplit split = commutator_decompose(a, spec);
        const Matrix direct = obc_commutator(a, 12);
        CHECK((split.g1 + split.g2 - direct).norm() < 1e-13);
        // G2 is supported within 2w cells of the ends.
        const int margin = 2 * w * m;
        const int inner = 12 * m - 2 * margin;
        CHECK(split.g2.block(margin, margin, inner, inner).norm() < 1e-13);
    }
}

TEST_CASE("commuting Bloch blocks force G1 to vanish") {
    for (unsigned seed : {11u, 12u, 13u}) {
        const int m = 2 + static_cast<int>(seed % 2);
        const MultiBandSpec a = commuting_ansatz(m, 2, seed);
        CHECK(check_bloch_conditions(a, 9).commute_pass);
        const CommutatorSplit split = commutator_decompose(a, LatticeSpec{12, 0.0, m});
        CHECK(split.g1.norm() < 1e-13);
        CHECK((split.g1 + split.g2 - obc_commutator(a, 12)).norm() < 1e-13);
    }
}

TEST_CASE("commutator_decompose preconditions") {
    const MultiBandSpec a = type2_ansatz(1.0, 0.5);
    CHECK_THROWS_AS(commutator_decompose(a, (LatticeSpec{4, 0.0, 2})),
                    std::invalid_argument);  // needs N > 2w
    CHECK_THROWS_AS(commutator_decompose(a, (LatticeSpec{8, 0.5, 2})),
                    std::invalid_argument);  // open chain only
}

TEST_CASE("audit_model aggregates the minimal-model story") {
    const MultiBandSpec a = minimal_ansatz(3.0);
    const AuditReport rep =
        audit_model(a, LatticeSpec{10, 0.0, 1}, PTOperators::reflection(10, 1), 1.0);
    CHECK(rep.pt_protocol.pass);
    CHECK(rep.pt_floquet.pass);
    CHECK(rep.bloch.pass());
    CHECK(rep.obc_noncommute);
    CHECK(rep.obc_commutator_norm == doctest::Approx(9.0 * std::sqrt(2.0)));  // t^2 sqrt(2)
    CHECK(rep.g1_norm < 1e-12);
    CHECK(rep.g2_norm == doctest::Approx(9.0 * std::sqrt(2.0)));
    CHECK(rep.obstructions.any);
}

TEST_CASE("audit_model on type2 with identity parity") {
    const AuditReport rep = audit_model(type2_ansatz(1.0, 0.5), LatticeSpec{8, 0.0, 2},
                                        PTOperators::identity(16), 1.0);
    CHECK(rep.pt_protocol.pass);
    CHECK(rep.pt_floquet.pass);
    CHECK(rep.bloch.pass());
    CHECK(rep.obc_noncommute);
    CHECK(rep.g1_norm < 1e-12);
    CHECK(rep.g2_norm > 0.1);
}
