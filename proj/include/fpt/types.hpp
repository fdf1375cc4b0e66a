// types.hpp — Shared aliases, error types, and the centralized tolerance record

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fpt {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;     // dense complex, the carrier for all operators
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Raised when an algorithm cannot deliver a trustworthy result
// (singular input, non-convergence, overflow). CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised for malformed experiment configuration. CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Single source of numerical tolerances used by the library and its tests.
struct Tolerances {
    double eig_residual{1e-10};  // accepted ||M v - xi v|| / ||M||_F on well-conditioned inputs
    double unitarity{1e-10};     // accepted ||U U^dag - I||_F for nominally unitary operators
    double branch_guard{1e-12};  // distance from the quasienergy branch cut that raises a flag
};

// Mutable process-wide tolerance record (defaults above).
Tolerances& tolerances();

// Throw std::invalid_argument unless m is square with only finite entries.
void require_square_finite(const Matrix& m, const char* who);

} // namespace fpt
