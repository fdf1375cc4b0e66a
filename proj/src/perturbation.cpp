#include "fpt/perturbation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fpt/linalg.hpp"

namespace fpt {

namespace {

Matrix comm(const Matrix& a, const Matrix& b) { return a * b - b * a; }

} // namespace

Matrix bch_truncated(const DrivingProtocol& p, int order) {
    p.validate();
    if (p.steps.size() != 2)
        throw std::invalid_argument("bch_truncated: expects a two-step protocol");
    const double d1 = p.steps[0].duration, d2 = p.steps[1].duration;
    if (std::abs(d1 - d2) > 1e-12 * p.period)
        throw std::invalid_argument("bch_truncated: expects equal step durations");
    if (order < 1 || order > 3)
        throw std::invalid_argument("bch_truncated: order must be 1, 2, or 3");

    const cplx mi(0.0, -1.0);
    Matrix x = mi * d1 * p.steps[0].h;
    Matrix y = mi * d2 * p.steps[1].h;
    Matrix series = x + y;
    if (order >= 2) series += 0.5 * comm(x, y);
    if (order >= 3) {
        Matrix xy = comm(x, y);
        series += (comm(x, xy) - comm(y, xy)) / 12.0;
    }
    return (cplx(0.0, 1.0) / p.period) * series;
}

double convergence_bound(const DrivingProtocol& p) {
    p.validate();
    double total = 0.0;
    for (const Step& s : p.steps) total += s.duration * operator_norm_2(s.h);
    if (total == 0.0) return std::numeric_limits<double>::infinity();
    const double scale = M_PI / total;  // saturation multiple of the couplings
    return p.lambda ? scale * *p.lambda : scale;
}

PerturbationSplit perturbation_split(const Matrix& h_f_obc, const Matrix& h0, int s) {
    require_square_finite(h_f_obc, "perturbation_split");
    require_square_finite(h0, "perturbation_split");
    if (h_f_obc.rows() != h0.rows())
        throw std::invalid_argument("perturbation_split: dimension mismatch");
    const int n = static_cast<int>(h_f_obc.rows());
    if (s < 1 || 2 * s >= n)
        throw std::invalid_argument("perturbation_split: cutoff must satisfy 1 <= s and 2s < N");

    PerturbationSplit out;
    out.cutoff = s;
    out.v = h_f_obc - h0;
    out.v_bulk = Matrix::Zero(n, n);
    out.v_bulk.block(s, s, n - 2 * s, n - 2 * s) = out.v.block(s, s, n - 2 * s, n - 2 * s);
    out.v_boundary = out.v - out.v_bulk;
    out.gamma_p = out.v_bulk.cwiseAbs().sum() / double(n - 2 * s) / double(n - 2 * s);
    return out;
}

std::vector<std::pair<int, double>> boundary_decay_profile(const PerturbationSplit& split,
                                                           DiagonalKind which) {
    const int n = static_cast<int>(split.v.rows());
    const int off = which == DiagonalKind::main ? 0 : 1;
    std::vector<std::pair<int, double>> profile;
    profile.reserve(n - off);
    for (int j = 0; j + off < n; ++j)
        profile.emplace_back(j + 1, std::abs(split.v(j, j + off)));
    return profile;
}

double fit_decay_length(const std::vector<std::pair<int, double>>& profile, int s) {
    if (s < 3) throw std::invalid_argument("fit_decay_length: need s >= 3 for a two-point window");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (const auto& [site, mag] : profile) {
        if (site < 2 || site > s || mag < 1e-300) continue;
        const double x = site, y = std::log(mag);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++count;
    }
    if (count < 2) return std::numeric_limits<double>::infinity();
    const double denom = count * sxx - sx * sx;
    const double slope = (count * sxy - sx * sy) / denom;
    if (!(slope < 0.0)) return std::numeric_limits<double>::infinity();
    return -1.0 / slope;
}

} // namespace fpt
