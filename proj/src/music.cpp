#include "srmusic/music.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/FFT>

#include "srmusic/errors.hpp"

namespace srmusic
{

ImagingGrid evaluate_grid(const CMatrixXd& W, Index N)
{
    const Index rows = W.rows();
    if (N < rows) {
        throw InvalidInput("evaluate_grid: grid resolution must be at least L+1");
    }
    ImagingGrid grid;
    grid.resolution = N;
    std::vector<double> power(static_cast<std::size_t>(N), 0.0);

    // (W^* phi_L(k/N))_c = sum_l conj(W_lc) e^{-2 pi i l k / N}: a forward DFT
    // of the conjugated, zero-padded column.
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> in(static_cast<std::size_t>(N));
    std::vector<std::complex<double>> out;
    for (Index c = 0; c < W.cols(); ++c) {
        std::fill(in.begin(), in.end(), std::complex<double>{});
        for (Index l = 0; l < rows; ++l) {
            in[static_cast<std::size_t>(l)] = std::conj(W(l, c));
        }
        fft.fwd(out, in);
        for (std::size_t k = 0; k < power.size(); ++k) {
            power[k] += std::norm(out[k]);
        }
    }

    grid.R.resize(power.size());
    grid.J.resize(power.size());
    const double norm2 = static_cast<double>(rows);
    for (std::size_t k = 0; k < power.size(); ++k) {
        const double r = std::min(1.0, std::sqrt(power[k] / norm2));
        grid.R[k] = r;
        grid.J[k] = r > 0.0 ? 1.0 / r : std::numeric_limits<double>::infinity();
    }
    return grid;
}

std::vector<GridPeak> grid_local_maxima(std::span<const double> values)
{
    const std::size_t n = values.size();
    std::vector<GridPeak> peaks;
    if (n < 3) {
        return peaks;
    }
    // Start at a run boundary so no run wraps past the scan origin.
    std::size_t origin = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (values[i] != values[(i + n - 1) % n]) {
            origin = i;
            break;
        }
    }
    if (origin == n) {
        return peaks; // constant
    }

    struct Run
    {
        std::size_t start, length;
        double value;
    };
    std::vector<Run> runs;
    std::size_t k = 0;
    while (k < n) {
        const std::size_t start = (origin + k) % n;
        const double v = values[start];
        std::size_t len = 1;
        while (k + len < n && values[(origin + k + len) % n] == v) {
            ++len;
        }
        runs.push_back({start, len, v});
        k += len;
    }

    const std::size_t m = runs.size();
    for (std::size_t r = 0; r < m; ++r) {
        const double prev = runs[(r + m - 1) % m].value;
        const double next = runs[(r + 1) % m].value;
        if (runs[r].value > prev && runs[r].value > next) {
            double pos = static_cast<double>(runs[r].start) + 0.5 * static_cast<double>(runs[r].length - 1);
            if (pos >= static_cast<double>(n)) {
                pos -= static_cast<double>(n);
            }
            peaks.push_back({pos, runs[r].value});
        }
    }
    return peaks;
}

namespace
{

/// Golden-section minimisation of R on [lo, hi].
double polish_peak(const CMatrixXd& W, double lo, double hi, int iterations)
{
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = noise_correlation(W, c);
    double fd = noise_correlation(W, d);
    for (int it = 0; it < iterations; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = noise_correlation(W, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = noise_correlation(W, d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

MusicEstimate music_estimate(const CVectorXd& y, const MusicOptions& opt)
{
    const Index M = y.size() - 1;
    if (M < 1) {
        throw InvalidInput("music_estimate: need at least two measurements");
    }
    if (opt.S < 1 || opt.L < opt.S || opt.L > M + 1 - opt.S) {
        throw InvalidInput("music_estimate: need 1 <= S <= L <= M+1-S (S = " + std::to_string(opt.S) +
                           ", L = " + std::to_string(opt.L) + ", M = " + std::to_string(M) + ")");
    }
    if (opt.N < 8 * M) {
        throw InvalidInput("music_estimate: grid resolution N must be at least 8M");
    }

    auto svd = svd_split(hankel(y, opt.L), opt.S);
    auto grid = evaluate_grid(svd.noise_space, opt.N);
    auto peaks = grid_local_maxima(grid.J);
    if (peaks.size() < static_cast<std::size_t>(opt.S)) {
        throw UnderdeterminedPeaks(peaks.size(), static_cast<std::size_t>(opt.S));
    }
    // Largest first; ties break toward smaller omega.
    std::stable_sort(peaks.begin(), peaks.end(), [](const GridPeak& a, const GridPeak& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.position < b.position;
    });
    peaks.resize(static_cast<std::size_t>(opt.S));

    const double h = 1.0 / static_cast<double>(opt.N);
    std::vector<double> points;
    std::vector<double> values;
    for (const auto& p : peaks) {
        double omega = p.position * h;
        double value = p.value;
        if (opt.refine) {
            omega = polish_peak(svd.noise_space, omega - h, omega + h, MusicOptions::refine_iterations);
            value = imaging_function(svd.noise_space, omega);
        }
        points.push_back(wrap_unit(omega));
        values.push_back(value);
    }

    // Report peaks in the order of the sorted support.
    std::vector<std::size_t> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
    std::vector<double> sorted_values;
    for (auto i : order) sorted_values.push_back(values[i]);

    try {
        return MusicEstimate{SupportSet(points), std::move(sorted_values), std::move(grid), std::move(svd),
                             opt.refine};
    } catch (const InvalidInput&) {
        throw NumericalError("music_estimate: refined peaks coincide");
    }
}

double grid_sup_diff(const ImagingGrid& clean, const ImagingGrid& noisy)
{
    if (clean.R.size() != noisy.R.size()) {
        throw InvalidInput("grid_sup_diff: grid resolutions differ");
    }
    double m = 0.0;
    for (std::size_t k = 0; k < clean.R.size(); ++k) {
        m = std::max(m, std::abs(noisy.R[k] - clean.R[k]));
    }
    return m;
}

double correlation_sup_diff(const CMatrixXd& W_clean, const CMatrixXd& W_noisy, Index N)
{
    if (W_clean.rows() != W_noisy.rows()) {
        throw InvalidInput("correlation_sup_diff: noise spaces live in different dimensions");
    }
    return grid_sup_diff(evaluate_grid(W_clean, N), evaluate_grid(W_noisy, N));
}

PerturbationReport wedin_bound(double hankel_noise_norm, double x_min, double sigma_min_L, double sigma_min_ML)
{
    if (!(hankel_noise_norm >= 0.0) || !(x_min > 0.0) || !(sigma_min_L > 0.0) || !(sigma_min_ML > 0.0)) {
        throw InvalidInput("wedin_bound: need |H(eta)| >= 0 and positive x_min, sigma_min values");
    }
    PerturbationReport r;
    r.hankel_noise_norm = hankel_noise_norm;
    r.x_min = x_min;
    r.sigma_min_L = sigma_min_L;
    r.sigma_min_ML = sigma_min_ML;
    const double denom = x_min * sigma_min_L * sigma_min_ML;
    r.wedin_bound = 2.0 * hankel_noise_norm / denom;
    r.precondition_ok = 2.0 * hankel_noise_norm < denom;
    return r;
}

double match_supports(const SupportSet& truth, const SupportSet& estimate)
{
    const std::size_t S = truth.size();
    if (estimate.size() != S) {
        throw InvalidInput("match_supports: cardinalities differ (" + std::to_string(S) + " vs " +
                           std::to_string(estimate.size()) + ")");
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t shift = 0; shift < S; ++shift) {
        double worst = 0.0;
        for (std::size_t j = 0; j < S && worst < best; ++j) {
            worst = std::max(worst, torus_distance(truth[j], estimate[(j + shift) % S]));
        }
        best = std::min(best, worst);
    }
    return best;
}

} // namespace srmusic
