#include "fpt/types.hpp"

namespace fpt {

Tolerances& tolerances() {
    static Tolerances record;
    return record;
}

void require_square_finite(const Matrix& m, const char* who) {
    if (m.rows() == 0 || m.rows() != m.cols())
        throw std::invalid_argument(std::string(who) + ": matrix must be square and non-empty");
    if (!m.allFinite())
        throw std::invalid_argument(std::string(who) + ": matrix has non-finite entries");
}

} // namespace fpt
