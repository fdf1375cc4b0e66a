#include "fpt/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "fpt/floquet.hpp"
#include "fpt/linalg.hpp"

namespace fpt {

namespace {

// Quasienergies from raw U_F eigenvalues, principal branch, Re E in
// [-pi/T, pi/T): E = (i/T) log xi with the branch cut itself mapped to the
// lower zone edge.
Vector quasi_from_eigs(const Vector& xi, double period) {
    Vector e(xi.size());
    for (Eigen::Index i = 0; i < xi.size(); ++i) {
        double a = std::arg(xi(i));
        if (a <= -M_PI) a = M_PI;
        e(i) = cplx(-a / period, std::log(std::abs(xi(i))) / period);
    }
    return e;
}

std::vector<Eigen::Index> sorted_order(const Vector& e) {
    std::vector<Eigen::Index> idx(e.size());
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (e(a).real() != e(b).real()) return e(a).real() < e(b).real();
        return e(a).imag() < e(b).imag();
    });
    return idx;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y,
                           double* intercept = nullptr) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (intercept) *intercept = (sy - slope * sx) / n;
    return slope;
}

} // namespace

double default_eps_im(const Vector& quasienergies) {
    double radius = 0.0;
    for (Eigen::Index i = 0; i < quasienergies.size(); ++i)
        radius = std::max(radius, std::abs(quasienergies(i)));
    return 1e-8 * std::max(1.0, radius);
}

SpectrumRecord classify_spectrum(const Vector& quasienergies, double eps_im,
                                 double parameter) {
    if (!(eps_im > 0.0))
        throw std::invalid_argument("classify_spectrum: eps_im must be positive");
    SpectrumRecord rec;
    rec.parameter = parameter;
    rec.quasienergies = quasienergies;
    for (Eigen::Index i = 0; i < quasienergies.size(); ++i) {
        const double im = std::abs(quasienergies(i).imag());
        rec.max_abs_im = std::max(rec.max_abs_im, im);
        if (im > eps_im) ++rec.n_com;
    }
    rec.p_com = quasienergies.size() ? double(rec.n_com) / double(quasienergies.size()) : 0.0;
    return rec;
}

SpectrumRecord spectrum_at(const ProtocolFamily& family, double parameter,
                           bool keep_eigvecs) {
    DrivingProtocol p = family(parameter);
    if (keep_eigvecs) {
        FloquetResult fr = floquet_of(p);
        SpectrumRecord rec =
            classify_spectrum(fr.quasienergies, default_eps_im(fr.quasienergies), parameter);
        rec.floquet_eigs = std::move(fr.floquet_eigs);
        rec.eigvecs = std::move(fr.eigvecs);
        return rec;
    }
    Vector xi = eigenvalues_only(evolve_protocol(p));
    Vector e = quasi_from_eigs(xi, p.period);
    auto order = sorted_order(e);
    Vector es(e.size()), xis(xi.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        es(i) = e(order[i]);
        xis(i) = xi(order[i]);
    }
    SpectrumRecord rec = classify_spectrum(es, default_eps_im(es), parameter);
    rec.floquet_eigs = std::move(xis);
    return rec;
}

double threshold_lambda_c(const ProtocolFamily& family,
                          std::pair<double, double> bracket,
                          double width, int coarse_steps) {
    auto [lo, hi] = bracket;
    if (!(lo < hi) || !(width > 0.0) || coarse_steps < 1)
        throw std::invalid_argument("threshold_lambda_c: malformed bracket, width, or step count");
    auto broken = [&](double x) { return spectrum_at(family, x).n_com > 0; };
    if (broken(lo))
        throw std::invalid_argument(
            "threshold_lambda_c: lower endpoint is already broken; bracket must straddle the onset");
    double prev = lo;
    for (int i = 1; i <= coarse_steps; ++i) {
        const double x = lo + (hi - lo) * i / coarse_steps;
        if (broken(x)) {
            double a = prev, b = x;
            while (b - a > width) {
                const double mid = 0.5 * (a + b);
                (broken(mid) ? b : a) = mid;
            }
            return 0.5 * (a + b);
        }
        prev = x;
    }
    throw std::invalid_argument("threshold_lambda_c: no onset inside the bracket");
}

std::vector<EPRecord> detect_eps(const std::vector<SpectrumRecord>& sweep) {
    if (sweep.size() < 2)
        throw std::invalid_argument("detect_eps: need at least two sweep records");
    for (std::size_t i = 1; i < sweep.size(); ++i)
        if (!(sweep[i].parameter > sweep[i - 1].parameter))
            throw std::invalid_argument("detect_eps: sweep must be sorted by parameter");

    std::vector<EPRecord> out;
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        if (sweep[i].n_com <= sweep[i - 1].n_com) continue;
        const Vector& e0 = sweep[i].quasienergies;
        const double eps0 = default_eps_im(e0);

        // Newborn pair: the conjugate pair with the smallest |Im| among the
        // complex eigenvalues of the onset record.
        int jb = -1;
        for (Eigen::Index j = 0; j < e0.size(); ++j) {
            if (e0(j).imag() <= eps0) continue;
            if (jb < 0 || e0(j).imag() < e0(jb).imag()) jb = static_cast<int>(j);
        }
        if (jb < 0) continue;  // jump without resolvable pair (threshold edge case)
        int jp = -1;
        for (Eigen::Index j = 0; j < e0.size(); ++j) {
            if (j == jb) continue;
            if (jp < 0 || std::abs(e0(j) - std::conj(e0(jb))) <
                              std::abs(e0(jp) - std::conj(e0(jb))))
                jp = static_cast<int>(j);
        }

        EPRecord rec;
        rec.pair_indices = {jb, jp};

        // Track the pair forward by nearest eigenvalue while it stays broken.
        std::vector<double> ls, bs;
        cplx p1 = e0(jb), p2 = e0(jp);
        for (std::size_t k = i; k < sweep.size(); ++k) {
            const Vector& e = sweep[k].quasienergies;
            Eigen::Index m1 = 0, m2 = 0;
            for (Eigen::Index j = 1; j < e.size(); ++j) {
                if (std::abs(e(j) - p1) < std::abs(e(m1) - p1)) m1 = j;
                if (std::abs(e(j) - p2) < std::abs(e(m2) - p2)) m2 = j;
            }
            p1 = e(m1); p2 = e(m2);
            const double b = 0.5 * (std::abs(p1.imag()) + std::abs(p2.imag()));
            if (b <= default_eps_im(e)) break;  // pocket closed: stop at re-entry
            ls.push_back(sweep[k].parameter);
            bs.push_back(b);
        }
        if (ls.empty()) continue;

        // Locate the EP by extrapolating Im^2 (linear in the parameter for a
        // square-root branch) to zero, clamped into the onset interval.
        const std::size_t kfit = std::min<std::size_t>(4, ls.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t k = 0; k < kfit; ++k) {
            sx += ls[k]; sy += bs[k] * bs[k];
            sxx += ls[k] * ls[k]; sxy += ls[k] * bs[k] * bs[k];
        }
        double lam_ep;
        if (kfit < 2) {
            lam_ep = sweep[i - 1].parameter;
        } else {
            const double slope = (kfit * sxy - sx * sy) / (kfit * sxx - sx * sx);
            const double icpt = (sy - slope * sx) / kfit;
            lam_ep = slope != 0.0 ? -icpt / slope : sweep[i - 1].parameter;
        }
        lam_ep = std::clamp(lam_ep, sweep[i - 1].parameter, sweep[i].parameter);
        rec.lambda_ep = lam_ep;

        // Power-law fit over [lam_ep + d, lam_ep + 10 d]; fall back to the
        // first ten broken records when the window is too sparse.
        const double d = sweep[i].parameter - sweep[i - 1].parameter;
        std::vector<double> lx, ly;
        for (std::size_t k = 0; k < ls.size(); ++k) {
            if (ls[k] < lam_ep + d * (1 - 1e-9) || ls[k] > lam_ep + 10 * d * (1 + 1e-9))
                continue;
            lx.push_back(std::log(ls[k] - lam_ep));
            ly.push_back(std::log(bs[k]));
        }
        if (lx.size() < 3) {
            lx.clear(); ly.clear();
            for (std::size_t k = 0; k < std::min<std::size_t>(10, ls.size()); ++k) {
                if (ls[k] <= lam_ep) continue;
                lx.push_back(std::log(ls[k] - lam_ep));
                ly.push_back(std::log(bs[k]));
            }
        }
        if (lx.size() >= 2) {
            double icpt = 0.0;
            rec.fit_exponent = least_squares_slope(lx, ly, &icpt);
            double ss = 0.0;
            for (std::size_t k = 0; k < lx.size(); ++k) {
                const double fit = icpt + rec.fit_exponent * lx[k];
                const double rel = (std::exp(fit) - std::exp(ly[k])) / std::exp(ly[k]);
                ss += rel * rel;
            }
            rec.fit_residual = std::sqrt(ss / double(lx.size()));
        }
        out.push_back(rec);
    }
    return out;
}

std::vector<TrajectoryPoint> trajectory(const std::function<Matrix(double)>& uf_at,
                                        const std::vector<double>& grid,
                                        const TrajectoryOptions& opts) {
    if (grid.size() < 2)
        throw std::invalid_argument("trajectory: need at least two grid points");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("trajectory: grid must be strictly increasing");

    const std::size_t steps = grid.size();
    std::vector<Vector> eigs(steps);
    std::vector<Matrix> vecs(steps);
    Eigen::Index n = 0;
    for (std::size_t i = 0; i < steps; ++i) {
        EigDecomposition d = eig_general(uf_at(grid[i]));
        if (i == 0) n = d.eigenvalues.size();
        else if (d.eigenvalues.size() != n)
            throw std::invalid_argument("trajectory: dimension changed across the grid");
        eigs[i] = std::move(d.eigenvalues);
        vecs[i] = std::move(d.right_eigenvectors);
    }

    // slot_col[i][s] = column at step i continuing slot s; slots are numbered
    // by the quasienergy-sorted order of the first grid point. match_ov holds
    // the overlap each column was matched with (1 at the first step).
    std::vector<std::vector<Eigen::Index>> slot_col(steps);
    std::vector<RealVector> match_ov(steps);
    {
        auto order = sorted_order(quasi_from_eigs(eigs[0], 1.0));
        slot_col[0].assign(order.begin(), order.end());
        match_ov[0] = RealVector::Ones(n);
    }
    for (std::size_t i = 1; i < steps; ++i) {
        Eigen::MatrixXd ov = (vecs[i - 1].adjoint() * vecs[i]).cwiseAbs();
        std::vector<Eigen::Index> flat(static_cast<std::size_t>(n) * n);
        std::iota(flat.begin(), flat.end(), Eigen::Index{0});
        std::sort(flat.begin(), flat.end(), [&](Eigen::Index a, Eigen::Index b) {
            return ov(a / n, a % n) > ov(b / n, b % n);
        });
        std::vector<Eigen::Index> to(n, -1);
        RealVector got = RealVector::Zero(n);
        std::vector<bool> used_prev(n, false), used_cur(n, false);
        Eigen::Index assigned = 0;
        for (Eigen::Index f : flat) {
            const Eigen::Index a = f / n, b = f % n;
            if (used_prev[a] || used_cur[b]) continue;
            used_prev[a] = used_cur[b] = true;
            to[a] = b;
            got(b) = ov(a, b);
            if (++assigned == n) break;
        }
        slot_col[i].resize(n);
        for (Eigen::Index s = 0; s < n; ++s) slot_col[i][s] = to[slot_col[i - 1][s]];
        match_ov[i] = std::move(got);
    }

    // Pair selection: caller-specified slots, or the two states that leave the
    // unit circle first (largest |xi| deviation at the first broken step).
    Eigen::Index s1, s2;
    if (opts.pair) {
        s1 = opts.pair->first;
        s2 = opts.pair->second;
        if (s1 < 0 || s2 < 0 || s1 >= n || s2 >= n || s1 == s2)
            throw std::invalid_argument("trajectory: pair indices out of range");
    } else {
        std::size_t fb = steps;
        for (std::size_t i = 0; i < steps && fb == steps; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (std::abs(std::abs(eigs[i](j)) - 1.0) > opts.break_tol) { fb = i; break; }
        if (fb == steps)
            throw std::invalid_argument(
                "trajectory: no eigenvalue leaves the unit circle; specify the pair explicitly");
        Eigen::Index j1 = 0;
        for (Eigen::Index j = 1; j < n; ++j)
            if (std::abs(std::abs(eigs[fb](j)) - 1.0) >
                std::abs(std::abs(eigs[fb](j1)) - 1.0)) j1 = j;
        const cplx mirror = 1.0 / std::conj(eigs[fb](j1));
        Eigen::Index j2 = j1 == 0 ? 1 : 0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != j1 && std::abs(eigs[fb](j) - mirror) < std::abs(eigs[fb](j2) - mirror))
                j2 = j;
        auto col_to_slot = [&](Eigen::Index col) {
            for (Eigen::Index s = 0; s < n; ++s)
                if (slot_col[fb][s] == col) return s;
            return Eigen::Index{0};
        };
        s1 = col_to_slot(j1);
        s2 = col_to_slot(j2);
    }

    std::vector<TrajectoryPoint> out;
    out.reserve(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        TrajectoryPoint tp;
        tp.parameter = grid[i];
        const Eigen::Index c1 = slot_col[i][s1], c2 = slot_col[i][s2];
        tp.xi1 = eigs[i](c1);
        tp.xi2 = eigs[i](c2);
        tp.ambiguous = std::min(match_ov[i](c1), match_ov[i](c2)) < 0.75;
        // Past the collision the antiunitary partner 1/conj(xi1) is the only
        // well-defined continuation of xi2; snap to the eigenvalue nearest it.
        if (std::abs(std::abs(tp.xi1 * tp.xi2) - 1.0) > opts.break_tol) {
            const cplx mirror = 1.0 / std::conj(tp.xi1);
            Eigen::Index best = -1;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == c1) continue;
                if (best < 0 || std::abs(eigs[i](j) - mirror) < std::abs(eigs[i](best) - mirror))
                    best = j;
            }
            tp.xi2 = eigs[i](best);
        }
        tp.product_modulus = std::abs(tp.xi1 * tp.xi2);
        out.push_back(tp);
    }
    return out;
}

BandwidthReport bandwidth_criterion(const MultiBandSpec& ansatz, double T,
                                    BandwidthRule rule, int k_points) {
    ansatz.validate();
    if (!(T > 0.0)) throw std::invalid_argument("bandwidth_criterion: period must be positive");
    if (k_points < 512)
        throw std::invalid_argument("bandwidth_criterion: need a dense k-grid (>= 512 points)");

    const int m = ansatz.band_dim();
    BandwidthReport rep;
    rep.rule = rule;
    std::vector<double> lo(m, std::numeric_limits<double>::infinity());
    std::vector<double> hi(m, -std::numeric_limits<double>::infinity());
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    for (int i = 0; i < k_points; ++i) {
        const double k = -M_PI + 2.0 * M_PI * i / k_points;
        Matrix hf = 0.5 * (bloch_hamiltonian(ansatz, 1, k) + bloch_hamiltonian(ansatz, 2, k));
        hf = 0.5 * (hf + hf.adjoint().eval());  // averaged blocks of a PT pair are Hermitian
        solver.compute(hf, Eigen::EigenvaluesOnly);
        for (int b = 0; b < m; ++b) {
            lo[b] = std::min(lo[b], solver.eigenvalues()(b));
            hi[b] = std::max(hi[b], solver.eigenvalues()(b));
        }
    }
    double max_band = 0.0;
    for (int b = 0; b < m; ++b) {
        rep.per_band.push_back(hi[b] - lo[b]);
        max_band = std::max(max_band, hi[b] - lo[b]);
    }
    rep.total = *std::max_element(hi.begin(), hi.end()) -
                *std::min_element(lo.begin(), lo.end());
    rep.relevant = rule == BandwidthRule::single_band ? max_band : rep.total;
    rep.predicted_critical = rep.relevant >= 2.0 * M_PI / T;
    return rep;
}

LocalizationRecord mean_positions(const Matrix& eigvecs, const Vector& quasienergies,
                                  int N, int m) {
    if (N < 2 || m < 1 || eigvecs.rows() != Eigen::Index(N) * m)
        throw std::invalid_argument("mean_positions: geometry does not match the eigenvector rows");
    if (eigvecs.cols() != quasienergies.size())
        throw std::invalid_argument("mean_positions: need one quasienergy per eigenvector");

    std::vector<Eigen::Index> idx(quasienergies.size());
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (quasienergies(a).imag() != quasienergies(b).imag())
            return quasienergies(a).imag() < quasienergies(b).imag();
        return quasienergies(a).real() < quasienergies(b).real();
    });

    LocalizationRecord rec;
    const int fit_lo = N / 4, fit_hi = fit_lo + N / 2;  // middle half of the chain
    for (Eigen::Index col : idx) {
        std::vector<double> w(N, 0.0);
        double total = 0.0;
        for (int j = 0; j < N; ++j) {
            for (int b = 0; b < m; ++b) w[j] += std::norm(eigvecs(Eigen::Index(j) * m + b, col));
            total += w[j];
        }
        double mean = 0.0;
        std::vector<double> xs, ys;
        for (int j = 0; j < N; ++j) {
            mean += (j + 1) * w[j] / total;
            if (j >= fit_lo && j < fit_hi && w[j] > 1e-300) {
                xs.push_back(j + 1);
                ys.push_back(0.5 * std::log(w[j] / total));  // log cell amplitude
            }
        }
        rec.mean_x.push_back(mean);
        rec.alpha.push_back(xs.size() >= 2 ? N * least_squares_slope(xs, ys) : 0.0);
        rec.energies.push_back(quasienergies(col));
    }
    return rec;
}

ScaleFreeFit scale_free_fits(const std::function<DrivingProtocol(int)>& model_at_size,
                             const std::vector<int>& sizes) {
    if (sizes.size() < 4)
        throw std::invalid_argument("scale_free_fits: need at least four sizes for the fit");
    ScaleFreeFit fit;
    std::vector<double> lx, ly;
    for (int N : sizes) {
        DrivingProtocol p = model_at_size(N);
        Vector e = quasi_from_eigs(eigenvalues_only(evolve_protocol(p)), p.period);
        const double eps = default_eps_im(e);
        double sum = 0.0;
        int count = 0;
        for (Eigen::Index i = 0; i < e.size(); ++i) {
            if (std::abs(e(i).imag()) <= eps) continue;
            sum += std::abs(e(i).imag());
            ++count;
        }
        if (count == 0)
            throw NumericalError("scale_free_fits: no complex states at size " + std::to_string(N));
        fit.points.push_back({N, sum / count, count});
        lx.push_back(std::log(double(N)));
        ly.push_back(std::log(sum / count));
    }
    fit.slope = least_squares_slope(lx, ly, &fit.intercept);
    return fit;
}

} // namespace fpt
