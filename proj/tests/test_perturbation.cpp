// test_perturbation.cpp — BCH truncations, convergence bound, bulk/boundary split

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "fpt/floquet.hpp"
#include "fpt/lattice.hpp"
#include "fpt/perturbation.hpp"
#include "fpt/types.hpp"

using namespace fpt;

namespace {

DrivingProtocol minimal_at(int n, double eta, double lambda, double T = 1.0) {
    return build_minimal(LatticeSpec{n, eta, 1}, 2.0 * lambda / T, T);
}

Matrix comm(const Matrix& a, const Matrix& b) { return a * b - b * a; }

} // namespace

TEST_CASE("bch order 1 is the duration-weighted average") {
    const DrivingProtocol p = minimal_at(8, 0.0, 1.3);
    CHECK((bch_truncated(p, 1) - averaged_hamiltonian(p)).norm() < 1e-15);
}

TEST_CASE("bch order 2 adds the boundary commutator with the right sign") {
    const double lambda = 1.3, T = 2.0;
    const DrivingProtocol p = minimal_at(9, 0.0, lambda, T);
    const Matrix l = build_shift(LatticeSpec{9, 0.0, 1}, ShiftDirection::left);
    const Matrix r = build_shift(LatticeSpec{9, 0.0, 1}, ShiftDirection::right);
    const Matrix second = bch_truncated(p, 2) - bch_truncated(p, 1);
    const Matrix expect = cplx(0, -1) * (lambda * lambda / (2 * T)) * comm(l, r);
    CHECK((second - expect).norm() < 1e-14 * expect.norm());
}

TEST_CASE("bch order 3 matches the nested-commutator formula") {
    const DrivingProtocol p = minimal_at(7, 0.0, 0.9);
    const double d = p.steps[0].duration;
    const Matrix x = cplx(0, -d) * p.steps[0].h;
    const Matrix y = cplx(0, -d) * p.steps[1].h;
    const Matrix series = x + y + 0.5 * comm(x, y) +
                          (comm(x, comm(x, y)) - comm(y, comm(x, y))) / 12.0;
    const Matrix expect = cplx(0, 1) / p.period * series;
    CHECK((bch_truncated(p, 3) - expect).norm() < 1e-13);
}

TEST_CASE("bch converges toward the exact effective Hamiltonian at weak drive") {
    const DrivingProtocol p = minimal_at(10, 0.0, 0.2);
    const Matrix exact = floquet_of(p).h_f;
    const double e1 = (bch_truncated(p, 1) - exact).norm();
    const double e2 = (bch_truncated(p, 2) - exact).norm();
    const double e3 = (bch_truncated(p, 3) - exact).norm();
    CHECK(e2 < 0.2 * e1);
    CHECK(e3 <= e2 + 1e-12);
}

TEST_CASE("bch rejects bad orders and unequal steps") {
    const DrivingProtocol p = minimal_at(6, 0.0, 1.0);
    CHECK_THROWS_AS(bch_truncated(p, 0), std::invalid_argument);
    CHECK_THROWS_AS(bch_truncated(p, 4), std::invalid_argument);
    DrivingProtocol uneven = p;
    uneven.steps[0].duration = 0.3;
    uneven.steps[1].duration = 0.7;
    CHECK_THROWS_AS(bch_truncated(uneven, 2), std::invalid_argument);
}

TEST_CASE("convergence_bound saturates at pi/2 in coupling units") {
    // ||t L|| = t at every eta, so sum_s ||H_s d_s|| = t T = 2 lambda and the
    // sufficient condition sum < pi saturates at lambda = pi/2.
    for (double eta : {0.0, 0.3, 1.0}) {
        const DrivingProtocol p = minimal_at(12, eta, 1.7);
        CHECK(convergence_bound(p) == doctest::Approx(M_PI / 2).epsilon(1e-9));
    }
}

TEST_CASE("convergence_bound without a recorded coupling returns the scale") {
    DrivingProtocol p;
    p.steps = {{Matrix::Identity(3, 3), 1.0}};
    p.period = 1.0;
    CHECK(convergence_bound(p) == doctest::Approx(M_PI).epsilon(1e-12));

    DrivingProtocol zero;
    zero.steps = {{Matrix::Zero(3, 3), 1.0}};
    zero.period = 1.0;
    CHECK(std::isinf(convergence_bound(zero)));
}

TEST_CASE("perturbation_split partitions exactly and averages the bulk") {
    Matrix h0 = Matrix::Zero(4, 4);
    Matrix hf = Matrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) hf(i, j) = cplx(i + 1, j - 2);
    const PerturbationSplit split = perturbation_split(hf, h0, 1);
    CHECK((split.v - hf).norm() == 0.0);
    CHECK((split.v_boundary + split.v_bulk - split.v).norm() == 0.0);
    // Bulk block is rows/cols 2..3 (1-based), everything else boundary.
    CHECK(split.v_bulk(0, 0) == cplx(0, 0));
    CHECK(split.v_bulk(1, 1) == hf(1, 1));
    CHECK(split.v_bulk(2, 1) == hf(2, 1));
    CHECK(split.v_boundary(1, 1) == cplx(0, 0));
    CHECK(split.v_boundary(0, 3) == hf(0, 3));
    double acc = 0.0;
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) acc += std::abs(hf(i, j));
    CHECK(split.gamma_p == doctest::Approx(acc / 4.0));
}

TEST_CASE("perturbation_split preconditions") {
    const Matrix z = Matrix::Zero(4, 4);
    CHECK_THROWS_AS(perturbation_split(z, z, 0), std::invalid_argument);
    CHECK_THROWS_AS(perturbation_split(z, z, 2), std::invalid_argument);  // 2s = N
    CHECK_THROWS_AS(perturbation_split(z, Matrix::Zero(3, 3), 1), std::invalid_argument);
}

TEST_CASE("decay profiles read the two diagonals") {
    Matrix v = Matrix::Zero(5, 5);
    for (int j = 0; j < 5; ++j) v(j, j) = cplx(0, std::exp(-double(j)));
    for (int j = 0; j + 1 < 5; ++j) v(j, j + 1) = 2.0 * std::exp(-double(j));
    const PerturbationSplit split = perturbation_split(v, Matrix::Zero(5, 5), 2);
    const auto main = boundary_decay_profile(split, DiagonalKind::main);
    REQUIRE(main.size() == 5);
    CHECK(main[0].first == 1);
    CHECK(main[3].second == doctest::Approx(std::exp(-3.0)));
    const auto secondary = boundary_decay_profile(split, DiagonalKind::secondary);
    REQUIRE(secondary.size() == 4);
    CHECK(secondary[2].second == doctest::Approx(2.0 * std::exp(-2.0)));
}

TEST_CASE("fit_decay_length recovers a clean exponential") {
    std::vector<std::pair<int, double>> profile;
    for (int j = 1; j <= 8; ++j) profile.emplace_back(j, 3.0 * std::exp(-j / 2.5));
    CHECK(fit_decay_length(profile, 8) == doctest::Approx(2.5).epsilon(1e-9));

    // Site 1 is excluded, so a contaminated first entry does not bias the fit.
    profile[0].second = 100.0;
    CHECK(fit_decay_length(profile, 8) == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("flat or growing profiles report an infinite decay length") {
    std::vector<std::pair<int, double>> flat, rising;
    for (int j = 1; j <= 6; ++j) {
        flat.emplace_back(j, 0.7);
        rising.emplace_back(j, std::exp(0.3 * j));
    }
    CHECK(std::isinf(fit_decay_length(flat, 6)));
    CHECK(std::isinf(fit_decay_length(rising, 6)));
    CHECK_THROWS_AS(fit_decay_length(flat, 2), std::invalid_argument);
}

TEST_CASE("minimal-model V is boundary localized in the unbroken phase") {
    const double lambda = 1.0;
    const DrivingProtocol p = minimal_at(40, 0.0, lambda);
    const FloquetResult fr = floquet_of(p);
    const PerturbationSplit split =
        perturbation_split(fr.h_f, averaged_hamiltonian(p), 10);
    // The corner elements dominate and the bulk average is far smaller.
    const double corner = std::abs(split.v(0, 0));
    CHECK(corner > 1e-2);
    CHECK(split.gamma_p < 0.05 * corner);
    // Main-diagonal profile decays away from the edge.
    const double len =
        fit_decay_length(boundary_decay_profile(split, DiagonalKind::main), 10);
    CHECK(len > 0.0);
    CHECK(len < 10.0);
}
