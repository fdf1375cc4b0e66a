// protocol.hpp — Piecewise-constant driving protocols (ordered Hamiltonian steps)

#pragma once

#include <optional>
#include <vector>

#include "fpt/types.hpp"

namespace fpt {

struct Step {
    Matrix h;          // step Hamiltonian (energy units)
    double duration;   // length of the step; all step durations sum to the period
};

// One driving period split into ordered steps. Steps compose left to right:
// the evolution operator is exp(-i h_1 d_1) * exp(-i h_2 d_2) * ...
struct DrivingProtocol {
    std::vector<Step> steps;
    double period{1.0};
    std::optional<double> lambda;  // dimensionless coupling t*T/2 when the model defines one

    int dim() const { return steps.empty() ? 0 : static_cast<int>(steps.front().h.rows()); }

    // Enforce invariants: >=1 step, positive durations summing to the period
    // within 1e-12, all step matrices square/finite with one shared dimension.
    void validate() const;
};

} // namespace fpt
