// test_floquet.cpp — Evolution operator, quasienergy extraction, folding

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fpt/floquet.hpp"
#include "fpt/lattice.hpp"
#include "fpt/linalg.hpp"
#include "fpt/types.hpp"

using namespace fpt;

namespace {

DrivingProtocol minimal_at(int n, double eta, double lambda, double T = 1.0) {
    return build_minimal(LatticeSpec{n, eta, 1}, 2.0 * lambda / T, T);
}

} // namespace

TEST_CASE("evolve_protocol composes steps first-step-leftmost") {
    const DrivingProtocol p = minimal_at(6, 0.0, 0.9);
    const Matrix direct = mat_exp(cplx(0, -0.5) * p.steps[0].h) *
                          mat_exp(cplx(0, -0.5) * p.steps[1].h);
    CHECK((evolve_protocol(p) - direct).norm() < 1e-15);

    // Ordering matters for non-commuting steps: the reverse product differs.
    const Matrix reversed = mat_exp(cplx(0, -0.5) * p.steps[1].h) *
                            mat_exp(cplx(0, -0.5) * p.steps[0].h);
    CHECK((evolve_protocol(p) - reversed).norm() > 1e-3);
}

TEST_CASE("two-site closed form: U_F = [[1-l^2, -il], [-il, 1]]") {
    for (double lambda : {0.3, 1.0, 2.5}) {
        const Matrix u = evolve_protocol(minimal_at(2, 0.0, lambda));
        CHECK(std::abs(u(0, 0) - cplx(1 - lambda * lambda, 0)) < 1e-14);
        CHECK(std::abs(u(0, 1) - cplx(0, -lambda)) < 1e-14);
        CHECK(std::abs(u(1, 0) - cplx(0, -lambda)) < 1e-14);
        CHECK(std::abs(u(1, 1) - cplx(1, 0)) < 1e-14);
    }
}

TEST_CASE("extract_hf sorts quasienergies and aligns the companion arrays") {
    const FloquetResult fr = floquet_of(minimal_at(8, 1.0, 1.2));
    for (int i = 0; i + 1 < 8; ++i) {
        const cplx a = fr.quasienergies[i], b = fr.quasienergies[i + 1];
        CHECK((a.real() < b.real() ||
               (a.real() == b.real() && a.imag() <= b.imag())));
    }
    for (int i = 0; i < 8; ++i) {
        CHECK(std::abs(fr.floquet_eigs[i] -
                       std::exp(cplx(0, -1.0) * fr.quasienergies[i])) < 1e-12);
        // eigvecs columns follow the same order
        CHECK((fr.u_f * fr.eigvecs.col(i) - fr.floquet_eigs[i] * fr.eigvecs.col(i))
                  .norm() < 1e-10);
    }
    CHECK(fr.residual_max < 1e-11);
}

TEST_CASE("quasienergy real parts live in the fundamental zone") {
    for (double T : {1.0, 0.5, 3.0}) {
        const FloquetResult fr = floquet_of(minimal_at(10, 0.0, 2.7, T));
        for (int i = 0; i < 10; ++i) {
            CHECK(fr.quasienergies[i].real() >= -M_PI / T - 1e-12);
            CHECK(fr.quasienergies[i].real() < M_PI / T + 1e-12);
        }
    }
}

TEST_CASE("h_f reassembles the evolution operator") {
    const DrivingProtocol p = minimal_at(12, 0.0, 3.0);  // broken phase
    const FloquetResult fr = floquet_of(p);
    CHECK((mat_exp(cplx(0, -p.period) * fr.h_f) - fr.u_f).norm() < 1e-11);
}

TEST_CASE("a unit-circle eigenvalue on the cut raises a branch flag") {
    // U = diag(-1, i): -1 sits exactly on the branch cut.
    Matrix u = Matrix::Zero(2, 2);
    u(0, 0) = cplx(-1, 0);
    u(1, 1) = cplx(0, 1);
    const FloquetResult fr = extract_hf(u, 1.0);
    int flagged = 0;
    for (bool f : fr.branch_flags) flagged += f ? 1 : 0;
    CHECK(flagged == 1);
    // The cut eigenvalue maps to the -pi side.
    CHECK(fr.quasienergies[0].real() == doctest::Approx(-M_PI));
}

TEST_CASE("extract_hf rejects singular operators") {
    CHECK_THROWS_AS(extract_hf(Matrix::Zero(4, 4), 1.0), NumericalError);
}

TEST_CASE("pbc quasienergies match the folded cosine dispersion") {
    const int n = 7;
    const double lambda = 0.3, T = 1.0;
    const FloquetResult fr = floquet_of(minimal_at(n, 1.0, lambda, T));
    Vector ref = pbc_quasienergies_minimal(n, lambda, T);
    std::sort(ref.data(), ref.data() + n, [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    for (int i = 0; i < n; ++i) {
        CHECK(std::abs(fr.quasienergies[i].real() - ref[i].real()) < 1e-9);
        CHECK(std::abs(fr.quasienergies[i].imag()) < 1e-10);
    }
}

TEST_CASE("pbc reference folds once the bandwidth exceeds the zone") {
    // 2*lambda = 4.0 > pi: parts of the cosine band wrap around.
    const Vector ref = pbc_quasienergies_minimal(24, 2.0, 1.0);
    bool folded = false;
    for (int i = 0; i < 24; ++i) {
        CHECK(ref[i].real() >= -M_PI);
        CHECK(ref[i].real() < M_PI);
        const double bare = 4.0 * std::cos(2 * M_PI * i / 24.0);
        if (std::abs(bare) > M_PI && std::abs(ref[i].real() - bare) > 1.0) folded = true;
    }
    CHECK(folded);
}

TEST_CASE("fold_quasienergy wraps edges into [-pi/T, pi/T)") {
    CHECK(fold_quasienergy(M_PI, 1.0) == doctest::Approx(-M_PI));
    CHECK(fold_quasienergy(-M_PI, 1.0) == doctest::Approx(-M_PI));
    CHECK(fold_quasienergy(3 * M_PI, 1.0) == doctest::Approx(-M_PI));
    CHECK(fold_quasienergy(0.25, 1.0) == doctest::Approx(0.25));
    CHECK(fold_quasienergy(2 * M_PI, 1.0) == doctest::Approx(0.0));
    // T = 2 halves the zone.
    CHECK(fold_quasienergy(M_PI / 2, 2.0) == doctest::Approx(-M_PI / 2));
}

TEST_CASE("averaged_hamiltonian weights steps by duration") {
    Matrix h1 = Matrix::Zero(2, 2), h2 = Matrix::Zero(2, 2);
    h1(0, 0) = 4.0;
    h2(1, 1) = 2.0;
    DrivingProtocol p;
    p.steps = {{h1, 0.25}, {h2, 0.75}};
    p.period = 1.0;
    const Matrix avg = averaged_hamiltonian(p);
    CHECK(std::abs(avg(0, 0) - cplx(1.0, 0)) < 1e-15);
    CHECK(std::abs(avg(1, 1) - cplx(1.5, 0)) < 1e-15);
}

TEST_CASE("protocol validation catches inconsistent durations") {
    DrivingProtocol p;
    p.steps = {{Matrix::Identity(2, 2), 0.4}, {Matrix::Identity(2, 2), 0.4}};
    p.period = 1.0;  // durations sum to 0.8
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.steps[1].duration = 0.6;
    p.validate();
    p.steps[0].duration = -0.2;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
