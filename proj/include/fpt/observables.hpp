// observables.hpp — Derived spectral quantities: complex-fraction order
// parameter, PT-breaking thresholds, exceptional-point detection and fits,
// eigenvalue-pair trajectories, bandwidth criterion, and localization metrics

#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "fpt/lattice.hpp"
#include "fpt/protocol.hpp"
#include "fpt/types.hpp"

namespace fpt {

// A protocol family over one real sweep parameter (coupling strength).
using ProtocolFamily = std::function<DrivingProtocol(double)>;

struct SpectrumRecord {
    double parameter{0.0};
    Vector quasienergies;   // sorted: ascending Re, ties ascending Im
    Vector floquet_eigs;    // aligned with quasienergies
    Matrix eigvecs;         // aligned columns; 0x0 when not retained
    int n_com{0};           // eigenvalues with |Im E| above the threshold
    double p_com{0.0};      // n_com / total
    double max_abs_im{0.0};
};

// Classification threshold: 1e-8 relative to max(1, spectral radius of E).
double default_eps_im(const Vector& quasienergies);

// Count complex quasienergies against eps_im and fill the record fragment.
SpectrumRecord classify_spectrum(const Vector& quasienergies, double eps_im,
                                 double parameter = 0.0);

// Full record for one parameter point (diagonalizes the protocol's U_F).
SpectrumRecord spectrum_at(const ProtocolFamily& family, double parameter,
                           bool keep_eigvecs = false);

// First parameter value where p_com turns positive, located by a coarse
// forward scan of the bracket followed by bisection to the given width.
// The scan matters: complex pockets can close again at larger couplings, so
// a blind bisection on the endpoints may land on a later pocket boundary
// instead of the first onset. Throws std::invalid_argument when the lower
// endpoint is already broken or no onset lies inside the bracket.
double threshold_lambda_c(const ProtocolFamily& family,
                          std::pair<double, double> bracket,
                          double width = 1e-4, int coarse_steps = 48);

struct EPRecord {
    double lambda_ep{0.0};            // onset refined by extrapolating Im^2 to zero
    std::pair<int, int> pair_indices; // positions in the sorted spectrum at the onset record
    double fit_exponent{0.0};         // from |Im E| = c (lambda - lambda_ep)^e on the broken side
    double fit_residual{0.0};         // relative L2 misfit over the window
};

// Locate every exceptional point in a sorted sweep: each jump of n_com births
// conjugate pairs, whose |Im| is tracked forward by eigenvalue continuity and
// fitted over the window [lambda_ep + d, lambda_ep + 10 d] (d = grid step).
// A Hermitian sweep yields an empty list.
std::vector<EPRecord> detect_eps(const std::vector<SpectrumRecord>& sweep);

struct TrajectoryPoint {
    double parameter{0.0};
    cplx xi1, xi2;             // the tracked pair of U_F eigenvalues
    double product_modulus{0}; // |xi1 * xi2|
    bool ambiguous{false};     // continuity matching was weak at this step
};

struct TrajectoryOptions {
    std::optional<std::pair<int, int>> pair;  // indices at the first grid point; auto-selected if unset
    double break_tol{1e-6};                   // |xi| deviation that marks the broken regime
};

// Follow one eigenvalue pair of U_F across a parameter grid. States are
// matched between neighbouring grid points by eigenvector overlap; past the
// collision the second member is pinned to the antiunitary partner of the
// first (the eigenvalue nearest 1/conj(xi1)), which is the only well-defined
// continuation through the defective point.
std::vector<TrajectoryPoint> trajectory(const std::function<Matrix(double)>& uf_at,
                                        const std::vector<double>& grid,
                                        const TrajectoryOptions& opts = {});

enum class BandwidthRule { single_band, total };

struct BandwidthReport {
    std::vector<double> per_band;  // width of each Bloch band of h_F = (h_1 + h_2)/2
    double total{0.0};             // global max - global min over all bands
    double relevant{0.0};          // max per-band width or total, per the rule
    BandwidthRule rule{BandwidthRule::single_band};
    bool predicted_critical{false};  // relevant width >= 2 pi / T
};

// Evaluate the folding criterion for boundary-induced PT breaking on a dense
// k-grid: decoupled-band models break when one band spans the frequency zone,
// hybridized models when the total spectrum does.
BandwidthReport bandwidth_criterion(const MultiBandSpec& ansatz, double T,
                                    BandwidthRule rule, int k_points = 1024);

struct LocalizationRecord {
    std::vector<double> mean_x;   // <x>_n in cells (1..N), sorted by ascending Im E
    std::vector<double> alpha;    // envelope exponent per state: |psi(x)| ~ e^{alpha x / N}
    std::vector<cplx> energies;   // matching quasienergies, same order
};

// Mean cell position and envelope exponent per eigenstate. Band weights are
// aggregated per cell; alpha comes from a log-linear fit over the middle half
// of the chain.
LocalizationRecord mean_positions(const Matrix& eigvecs, const Vector& quasienergies,
                                  int N, int m);

struct ScaleFreePoint {
    int size{0};
    double mean_abs_im{0.0};
    int n_com{0};
};

struct ScaleFreeFit {
    double slope{0.0};      // least-squares slope of log mean|Im E| vs log N
    double intercept{0.0};
    std::vector<ScaleFreePoint> points;
};

// Mean broken-pair |Im E| against system size (eigenvalues only; the 1/N law
// of the scale-free regime shows up as slope -1). Throws NumericalError when
// a size has no complex states.
ScaleFreeFit scale_free_fits(const std::function<DrivingProtocol(int)>& model_at_size,
                             const std::vector<int>& sizes);

} // namespace fpt
