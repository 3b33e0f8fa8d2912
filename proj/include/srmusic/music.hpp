#ifndef SRMUSIC_MUSIC_HPP
#define SRMUSIC_MUSIC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "srmusic/fourier.hpp"
#include "srmusic/torus.hpp"
#include "srmusic/types.hpp"

namespace srmusic
{

///
/// Noise-space correlation R(omega) = |W^* phi_L(omega)| / |phi_L(omega)|
/// for a noise space W with orthonormal columns of length L+1.
///
template <typename Derived>
typename Derived::RealScalar noise_correlation(const Eigen::MatrixBase<Derived>& W,
                                               typename Derived::RealScalar omega)
{
    using Real = typename Derived::RealScalar;
    const Index L = W.rows() - 1;
    const auto phi = steering_vector<Real>(omega, L);
    const Real r = (W.adjoint() * phi).norm() / std::sqrt(static_cast<Real>(L + 1));
    return std::min(r, Real(1));
}

/// J = 1/R, with +inf where R vanishes.
template <typename Derived>
typename Derived::RealScalar imaging_function(const Eigen::MatrixBase<Derived>& W,
                                              typename Derived::RealScalar omega)
{
    using Real = typename Derived::RealScalar;
    const Real r = noise_correlation(W, omega);
    return r > Real(0) ? Real(1) / r : std::numeric_limits<Real>::infinity();
}

/// R and J sampled on the nodes k/N, 0 <= k < N.
struct ImagingGrid
{
    Index resolution = 0;
    std::vector<double> R;
    std::vector<double> J;

    double node(Index k) const noexcept { return static_cast<double>(k) / static_cast<double>(resolution); }
};

/// Evaluates the grid through one length-N FFT per noise-space column. N >= L+1.
ImagingGrid evaluate_grid(const CMatrixXd& W, Index N);

struct GridPeak
{
    double position = 0.0; // fractional grid index; plateaus report their midpoint
    double value = 0.0;
};

/// Circular strict local maxima. A run of equal values counts once, at its
/// midpoint, when both neighbouring runs are lower.
std::vector<GridPeak> grid_local_maxima(std::span<const double> values);

struct MusicOptions
{
    Index S = 1;
    Index L = 0;
    Index N = 0;
    bool refine = false;

    /// Golden-section iterations of the peak polish.
    static constexpr int refine_iterations = 40;
};

/// Default grid resolution, N = 16 M.
constexpr Index default_grid(Index M) noexcept { return 16 * M; }

struct MusicEstimate
{
    SupportSet recovered;
    std::vector<double> peak_values;
    ImagingGrid grid;
    HankelSvd<double> svd;
    bool refined = false;
};

///
/// Single-snapshot MUSIC: Hankel matrix of y, SVD split, imaging function on
/// the grid, the S largest circular local maxima. Optionally polishes each
/// peak by golden-section search on the bracketing grid interval.
///
/// Throws UnderdeterminedPeaks when J has fewer than S local maxima.
///
MusicEstimate music_estimate(const CVectorXd& y, const MusicOptions& options);

/// Grid approximation of sup_omega |R_noisy - R_clean|.
double correlation_sup_diff(const CMatrixXd& W_clean, const CMatrixXd& W_noisy, Index N);
double grid_sup_diff(const ImagingGrid& clean, const ImagingGrid& noisy);

///
/// Ingredients and value of the Wedin-type bound
///
///   |R_noisy - R|_inf <= 2 |H(eta)|_2 / (x_min sigma_min(Phi_L) sigma_min(Phi_{M-L}))
///
/// valid when 2 |H(eta)|_2 < x_min sigma_min(Phi_L) sigma_min(Phi_{M-L}).
///
struct PerturbationReport
{
    double sup_norm_diff = 0.0;
    double wedin_bound = 0.0;
    bool precondition_ok = false;
    double hankel_noise_norm = 0.0;
    double sigma_min_L = 0.0;
    double sigma_min_ML = 0.0;
    double x_min = 0.0;
};

PerturbationReport wedin_bound(double hankel_noise_norm, double x_min, double sigma_min_L, double sigma_min_ML);

/// Minimax torus error over bijections between equal-size supports.
double match_supports(const SupportSet& truth, const SupportSet& estimate);

} // namespace srmusic

#endif // SRMUSIC_MUSIC_HPP
