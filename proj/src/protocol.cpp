#include "fpt/protocol.hpp"

#include <cmath>

namespace fpt {

void DrivingProtocol::validate() const {
    if (steps.empty())
        throw std::invalid_argument("DrivingProtocol: at least one step required");
    if (!(period > 0.0))
        throw std::invalid_argument("DrivingProtocol: period must be positive");
    double total = 0.0;
    const Eigen::Index n = steps.front().h.rows();
    for (const Step& s : steps) {
        require_square_finite(s.h, "DrivingProtocol step");
        if (s.h.rows() != n)
            throw std::invalid_argument("DrivingProtocol: steps must share one dimension");
        if (!(s.duration > 0.0))
            throw std::invalid_argument("DrivingProtocol: step durations must be positive");
        total += s.duration;
    }
    if (std::abs(total - period) > 1e-12 * std::max(1.0, period))
        throw std::invalid_argument("DrivingProtocol: step durations must sum to the period");
}

} // namespace fpt
