// symmetry.hpp — Mechanical checks of the PT construction conditions and the
// exact bulk/boundary decomposition of the open-chain step commutator

#pragma once

#include <vector>

#include "fpt/lattice.hpp"
#include "fpt/protocol.hpp"
#include "fpt/types.hpp"

namespace fpt {

// Antiunitary PT action: parity matrix P (real, involutive) composed with
// complex conjugation. The conjugation is applied implicitly by the checks.
struct PTOperators {
    Matrix parity;

    // Spatial reflection |j> -> |N-j+1| on the cells, identity on the bands.
    static PTOperators reflection(int sites, int band_dim);
    // Identity parity (pure complex-conjugation symmetry).
    static PTOperators identity(int dim);

    // Enforce: real entries, P^2 = identity.
    void validate() const;
};

struct CheckResult {
    bool pass{false};
    double defect{0.0};  // Frobenius norm of the violated identity
};

// Condition on the protocol: P conj(H_1) P = H_2 (two-step protocols only).
// Pass threshold 1e-12.
CheckResult check_pt_protocol(const DrivingProtocol& p, const PTOperators& pt);

// Condition on the composed evolution: P conj(U_F) P U_F = 1. Pass threshold
// 1e-9. For P = identity it reduces to U_F symmetric.
CheckResult check_pt_of_floquet(const Matrix& u_f, const PTOperators& pt);

struct BlochConditionReport {
    bool hermitian_sum_pass{false};   // h_1(k) + h_2(k) Hermitian on the grid
    double max_hermitian_defect{0.0};
    bool commute_pass{false};         // [h_1(k), h_2(k)] = 0 on the grid
    double max_commutator_norm{0.0};
    int k_samples{0};

    bool pass() const { return hermitian_sum_pass && commute_pass; }
};

// Evaluate both Bloch-space construction conditions on a uniform k-grid.
// The defects are trigonometric polynomials of degree <= 2w, so 4w+1 distinct
// samples already certify exact vanishing; call sites default higher.
BlochConditionReport check_bloch_conditions(const MultiBandSpec& ansatz, int k_samples);

// Flags for the three obstruction families at hopping distances (r, rp):
// [X1^r, Y2^rp] != 0, [Y1^r, X2^rp] != 0, Y2^rp X1^r - X2^rp Y1^r != 0.
struct ObstructionFlags {
    int r{0}, rp{0};
    bool xy_commutator{false};
    bool yx_commutator{false};
    bool product_difference{false};
};

struct ObstructionReport {
    std::vector<ObstructionFlags> entries;  // one per (r, rp) pair
    bool any{false};                        // at least one flag set anywhere
};

// Decide each obstruction family against 1e-12 relative to the largest
// hopping-block norm; `any` false means no boundary non-Hermiticity possible.
ObstructionReport check_obstructions(const MultiBandSpec& ansatz);

struct CommutatorSplit {
    Matrix g1;  // translation-covariant (bulk) part; vanishes iff the Bloch blocks commute
    Matrix g2;  // boundary part, supported within 2w cells of the chain ends
};

// Exact decomposition [H_1, H_2]_OBC = G1 + G2 of the open-chain commutator
// of a two-step ansatz. Requires eta = 0 and N > 2w. G1 collects the terms
// whose lattice factors are plain shift powers; G2 collects the differences
// between wrapped and unwrapped shift products, which cancel in the bulk.
CommutatorSplit commutator_decompose(const MultiBandSpec& ansatz, const LatticeSpec& spec);

// Aggregated audit of one candidate model (conditions (i)-(iii) plus the
// obstruction flags and assembled decomposition norms).
struct AuditReport {
    CheckResult pt_protocol;            // P conj(H_1) P = H_2
    CheckResult pt_floquet;             // P conj(U_F) P U_F = 1
    BlochConditionReport bloch;         // Hermitian sum + commuting Bloch blocks
    double obc_commutator_norm{0.0};    // ||[H_1, H_2]||_F at eta = 0
    bool obc_noncommute{false};         // norm > 1e-12 (boundary effect present)
    ObstructionReport obstructions;
    double g1_norm{0.0};
    double g2_norm{0.0};
};

// Run every check for an ansatz at a given geometry and parity choice.
AuditReport audit_model(const MultiBandSpec& ansatz, const LatticeSpec& spec,
                        const PTOperators& pt, double T);

} // namespace fpt
