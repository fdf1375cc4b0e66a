// perturbation.hpp — The non-Hermitian correction V = H_F(OBC) - H_0:
// truncated commutator series, convergence bound, boundary/bulk split,
// and decay profiles of the boundary-localized matrix elements

#pragma once

#include <utility>
#include <vector>

#include "fpt/protocol.hpp"
#include "fpt/types.hpp"

namespace fpt {

// Effective Hamiltonian of a two-equal-step protocol truncated at the given
// commutator order (1, 2, or 3):
//   order 1: (H_1 + H_2)/2
//   order 2: + (1/T) * (1/2) [X, Y]              with X = -i H_1 T/2, Y = -i H_2 T/2
//   order 3: + (1/T) * (1/12)([X,[X,Y]] - [Y,[X,Y]])
// mapped back to a Hamiltonian via H = (i/T)(X + Y + ...).
Matrix bch_truncated(const DrivingProtocol& p, int order);

// Coupling-scale multiple at which the sufficient convergence condition
// sum_s ||H_s d_s||_2 < pi saturates. Expressed in lambda units when the
// protocol defines lambda (minimal model: pi/2 under periodic boundaries);
// +inf for the zero protocol.
double convergence_bound(const DrivingProtocol& p);

struct PerturbationSplit {
    Matrix v;           // H_F(OBC) - H_0
    Matrix v_boundary;  // rows or columns within s cells of an edge
    Matrix v_bulk;      // complement (exact partition: v = v_boundary + v_bulk)
    int cutoff{0};      // s
    double gamma_p{0};  // (N-2s)^{-2} sum_{i,j=s+1}^{N-s} |V_ij|
};

// Split V into boundary and bulk by the cell cutoff s (requires 2s < N) and
// evaluate the averaged bulk magnitude gamma_p.
PerturbationSplit perturbation_split(const Matrix& h_f_obc, const Matrix& h0, int s);

enum class DiagonalKind { main, secondary };

// |V_{j,j}| or |V_{j,j+1}| against the cell index j (1-based), for decay plots
// and for the exponential fit below.
std::vector<std::pair<int, double>> boundary_decay_profile(const PerturbationSplit& split,
                                                           DiagonalKind which);

// Decay length of a profile from a least-squares line on log magnitude over
// cells [2, s] (cell 1 can carry the direct boundary term and is excluded).
// Returns the e-folding length in cells; +inf when the window is flat.
double fit_decay_length(const std::vector<std::pair<int, double>>& profile, int s);

} // namespace fpt
