// linalg.hpp — Dense complex eigendecomposition, matrix exponential, and
// principal-branch logarithm for (possibly non-normal) operators

#pragma once

#include <vector>

#include "fpt/types.hpp"

namespace fpt {

struct EigDecomposition {
    Vector eigenvalues;
    Matrix right_eigenvectors;   // column-stacked, each normalized to unit 2-norm
    RealVector residuals;        // ||M v_i - xi_i v_i||_2 / ||M||_F per pair
    double condition_estimate;   // ||W||_F * ||W^{-1}||_F of the eigenvector matrix (inf if singular)
};

// Full non-Hermitian eigendecomposition (QR iteration on the Hessenberg form).
// Near-defective inputs still return pairs; defectiveness shows up as a large
// condition_estimate, never as an exception.
EigDecomposition eig_general(const Matrix& m);

// Eigenvalues without vectors — same algorithm, several times faster. The hot
// path for classification sweeps where only the spectrum matters.
Vector eigenvalues_only(const Matrix& m);

// e^m. Nilpotent shift-like generators take an exact terminating-series path;
// everything else goes through scaling-and-squaring Pade. Throws NumericalError
// if the result overflows.
Matrix mat_exp(const Matrix& m);

struct UnitaryLog {
    Matrix h;                        // (i/period) * log u, principal branch
    std::vector<bool> branch_flags;  // eigenvalue of u within branch_guard of the cut at arg = pi
};

// Effective generator of u over one period: h = (i/period) log u with every
// quasienergy real part wrapped into [-pi/period, pi/period); an eigenvalue
// exactly on the cut is assigned to the -pi/period side and flagged.
// u need not be unitary (invertibility is the only requirement); the log runs
// through the eigendecomposition while it is well conditioned and falls back
// to a Schur-based algorithm near defective points.
UnitaryLog mat_log_unitary(const Matrix& u, double period);

// Same contract as mat_log_unitary for callers that already diagonalized u;
// the decomposition is reused unless its conditioning forces the Schur path.
UnitaryLog log_from_decomposition(const EigDecomposition& eig, const Matrix& u, double period);

// ||w||_F * ||w^{-1}||_F; +inf when w is numerically singular.
double condition_estimate(const Matrix& w);

// Largest singular value (deterministic power iteration on m^dag m).
double operator_norm_2(const Matrix& m);

} // namespace fpt
