// lattice.hpp — Lattice shift operators, the minimal two-step model, the
// general multi-band ansatz, and the two shipped two-band models

#pragma once

#include <vector>

#include "fpt/protocol.hpp"
#include "fpt/types.hpp"

namespace fpt {

// Chain geometry. eta interpolates the boundary: 0 open, 1 periodic.
struct LatticeSpec {
    int sites{2};        // number of unit cells N
    double eta{0.0};     // wrap amplitude in [0, 1]
    int band_dim{1};     // internal (band) dimension m; total Hilbert space is N*m

    // Enforce N >= 2, eta in [0,1], band_dim >= 1; with a hopping range w the
    // chain must satisfy N > 2w so the two boundary regions do not overlap.
    void validate(int range_w = 1) const;
};

enum class ShiftDirection { left, right };

// Two-step driving ansatz: H_i = 1 (x) A_i + sum_r [ L^r (x) X_i[r] + R^r (x) Y_i[r] ],
// i = 1, 2, with m-by-m blocks and hopping range w (r runs 1..w, stored 0-based).
struct MultiBandSpec {
    int range_w{1};
    Matrix a1, a2;                   // intracell blocks
    std::vector<Matrix> x1, x2;      // leftward hoppings at distance r
    std::vector<Matrix> y1, y2;      // rightward hoppings at distance r

    int band_dim() const { return static_cast<int>(a1.rows()); }

    // Enforce matching square block dimensions, finite entries, and
    // exactly range_w entries in each hopping list.
    void validate() const;
};

// L^r or R^r on N sites; wrap-around entries carry eta (one wrap each for r < N).
// At eta = 0 the matrix is nilpotent. Throws for r < 1 or r >= N.
Matrix build_shift(const LatticeSpec& spec, ShiftDirection direction, int power = 1);

// Minimal scalar model: step 1 is t*L, step 2 is t*R, equal durations T/2.
// Reports lambda = t*T/2 on the protocol.
DrivingProtocol build_minimal(const LatticeSpec& spec, double t, double T);

// Assemble the two-step protocol of an arbitrary multi-band ansatz.
// Tensor ordering is (lattice (x) band), site-major.
DrivingProtocol build_general(const LatticeSpec& spec, const MultiBandSpec& ansatz, double T);

// Two-band model whose hoppings all share one matrix structure B = t*sx + sz:
// H_1(2) = 1 (x) (3/2)B + L(R) (x) B. Bands stay decoupled for every t.
DrivingProtocol build_type1(const LatticeSpec& spec, double t, double T);

// Two-band model with genuinely non-commuting hopping blocks:
// H_1(2) = t1 (L+R) (x) [s0 + (1 +- i) sx] + t2 (L^2+R^2) (x) [s0 + (1 +- i) sz].
DrivingProtocol build_type2(const LatticeSpec& spec, double t1, double t2, double T);

// Ansatz records behind the shipped models (for audits and Bloch analysis).
MultiBandSpec minimal_ansatz(double t);
MultiBandSpec type1_ansatz(double t);
MultiBandSpec type2_ansatz(double t1, double t2);

// Bloch block of step `which` (1 or 2): h_i(k) = A_i + sum_r [ e^{ikr} X_i[r] + e^{-ikr} Y_i[r] ].
Matrix bloch_hamiltonian(const MultiBandSpec& ansatz, int which, double k);

} // namespace fpt
