// floquet.hpp — One-period evolution operator, effective Hamiltonian with the
// principal branch convention, and analytic references for the minimal model

#pragma once

#include <vector>

#include "fpt/linalg.hpp"
#include "fpt/protocol.hpp"
#include "fpt/types.hpp"

namespace fpt {

struct FloquetResult {
    Matrix u_f;                      // one-period evolution operator
    Matrix h_f;                      // (i/T) log u_f, principal branch
    Vector quasienergies;            // E_n, sorted by ascending Re, ties by ascending Im
    Vector floquet_eigs;             // xi_n = e^{-i E_n T}, same order
    Matrix eigvecs;                  // right eigenvectors of u_f, columns matching the order
    double residual_max;             // worst eigenpair residual
    double condition_estimate;       // of the eigenvector matrix (large near EPs)
    std::vector<bool> branch_flags;  // quasienergy within branch_guard of the zone edge
};

// U_F: product of the step exponentials, first step leftmost
// (exp(-i h_1 d_1) * exp(-i h_2 d_2) * ...).
Matrix evolve_protocol(const DrivingProtocol& p);

// Diagonalize u_f and report quasienergies E = (i/T) log xi with Re E wrapped
// into [-pi/T, pi/T), plus the reassembled h_f. Throws NumericalError when u_f
// is singular.
FloquetResult extract_hf(const Matrix& u_f, double T);

// Convenience: evolve_protocol followed by extract_hf.
FloquetResult floquet_of(const DrivingProtocol& p);

// Analytic periodic-boundary quasienergies of the minimal model:
// fold((2 lambda / T) cos(2 pi n / N)) for n = 0..N-1, in n order.
Vector pbc_quasienergies_minimal(int N, double lambda, double T);

// Duration-weighted mean of the step Hamiltonians (leading effective term).
Matrix averaged_hamiltonian(const DrivingProtocol& p);

// Wrap a real quasienergy into the fundamental interval [-pi/T, pi/T).
double fold_quasienergy(double e, double T);

} // namespace fpt
