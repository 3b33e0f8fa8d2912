#include "srmusic/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "srmusic/errors.hpp"
#include "srmusic/fourier.hpp"
#include "srmusic/rng.hpp"

namespace srmusic
{

double fourier_sigma_min(const SupportSet& omega, int M)
{
    return sigma_min(vandermonde(omega, M));
}

void ClumpBoundTerms::validate() const
{
    if (constants.size() != clump_sizes.size() || constants.empty()) {
        throw InvalidInput("ClumpBoundTerms: constants and clump_sizes must be nonempty and of equal length");
    }
    if (std::any_of(constants.begin(), constants.end(), [](double c) { return !(c > 0.0); })) {
        throw InvalidInput("ClumpBoundTerms: constants must be positive");
    }
    if (std::any_of(clump_sizes.begin(), clump_sizes.end(), [](int l) { return l < 1; })) {
        throw InvalidInput("ClumpBoundTerms: clump sizes must be positive");
    }
    if (!(alpha > 0.0) || M < 1) {
        throw InvalidInput("ClumpBoundTerms: need alpha > 0 and M >= 1");
    }
}

double lower_bound_value(const ClumpBoundTerms& terms)
{
    terms.validate();
    double sum = 0.0;
    for (std::size_t a = 0; a < terms.constants.size(); ++a) {
        const double t = terms.constants[a] * std::pow(terms.alpha, -(terms.clump_sizes[a] - 1));
        sum += t * t;
    }
    return std::sqrt(static_cast<double>(terms.M) / sum);
}

void require_m_at_least_s_squared(int M, int S, bool allow_small_M)
{
    if (!allow_small_M && static_cast<long long>(M) < static_cast<long long>(S) * S) {
        throw PreconditionError({"M >= S^2 (M = " + std::to_string(M) + ", S = " + std::to_string(S) + ")"});
    }
}

SupportSet arithmetic_progression(double omega0, int lambda, double alpha, int M)
{
    if (lambda < 1 || M < 1 || !(alpha > 0.0) || (lambda - 1) * alpha >= M || !(omega0 >= 0.0 && omega0 < 1.0)) {
        throw InvalidInput("arithmetic_progression: need lambda >= 1, M >= 1, 0 < (lambda-1) alpha < M, omega0 in [0,1)");
    }
    std::vector<double> points;
    points.reserve(static_cast<std::size_t>(lambda));
    for (int k = 0; k < lambda; ++k) {
        points.push_back(wrap_unit(omega0 + k * alpha / M));
    }
    return SupportSet(std::move(points));
}

std::vector<ScalingSample> sigma_min_sweep(const ClumpSpec& spec, std::span<const double> alphas, std::uint64_t seed)
{
    std::vector<ScalingSample> out;
    out.reserve(alphas.size());
    if (spec.num_clumps == 1) {
        if (spec.clump_sizes.size() != 1) {
            throw InvalidInput("ClumpSpec: clump_sizes must have num_clumps entries");
        }
        double omega0 = 0.0;
        if (spec.anchors && !spec.anchors->empty()) {
            omega0 = spec.anchors->front();
        } else {
            Rng rng(seed);
            omega0 = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        }
        for (double alpha : alphas) {
            const auto omega = arithmetic_progression(omega0, spec.clump_sizes.front(), alpha, spec.M);
            out.push_back({alpha, fourier_sigma_min(omega, spec.M)});
        }
        return out;
    }
    for (double alpha : alphas) {
        ClumpSpec s = spec;
        s.alpha = alpha;
        const auto gen = generate_clumps(s, seed);
        out.push_back({alpha, fourier_sigma_min(gen.support, spec.M)});
    }
    return out;
}

ClumpBoundTerms fit_clump_constants(const ClumpSpec& spec, std::span<const double> alphas, std::uint64_t seed)
{
    if (spec.num_clumps != 1) {
        throw InvalidInput("fit_clump_constants: single-clump specs only");
    }
    if (alphas.size() < 4) {
        throw InvalidInput("fit_clump_constants: at least 4 alpha samples are required");
    }
    const int lambda = spec.clump_sizes.front();
    double C = 0.0;
    for (const auto& s : sigma_min_sweep(spec, alphas, seed)) {
        if (!(s.sigma_min > 0.0)) {
            throw NumericalError("fit_clump_constants: sigma_min vanished at alpha = " + std::to_string(s.alpha));
        }
        C = std::max(C, std::sqrt(static_cast<double>(spec.M)) * std::pow(s.alpha, lambda - 1) / s.sigma_min);
    }
    return ClumpBoundTerms{{C}, {lambda}, spec.alpha, spec.M};
}

ScalingFit fit_scaling_exponent(std::span<const ScalingSample> samples)
{
    if (samples.size() < 4) {
        throw InvalidInput("fit_scaling_exponent: at least 4 samples are required");
    }
    ScalingFit fit;
    fit.samples.assign(samples.begin(), samples.end());
    for (const auto& s : fit.samples) {
        if (!(s.alpha > 0.0 && s.alpha < 1.0) || !(s.sigma_min > 0.0)) {
            throw DomainError("fit_scaling_exponent: need 0 < alpha < 1 and sigma_min > 0");
        }
    }
    std::sort(fit.samples.begin(), fit.samples.end(),
              [](const ScalingSample& a, const ScalingSample& b) { return a.alpha > b.alpha; });
    for (std::size_t i = 0; i + 1 < fit.samples.size(); ++i) {
        if (fit.samples[i].alpha == fit.samples[i + 1].alpha) {
            throw InvalidInput("fit_scaling_exponent: alphas must be distinct");
        }
    }

    const auto n = static_cast<double>(fit.samples.size());
    double mx = 0.0, my = 0.0;
    for (const auto& s : fit.samples) {
        mx += std::log(s.alpha);
        my += std::log(s.sigma_min);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& s : fit.samples) {
        const double dx = std::log(s.alpha) - mx;
        const double dy = std::log(s.sigma_min) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

UpperBoundWitness upper_bound_witness(int lambda, double alpha, int M, int S, double omega0,
                                      std::uint64_t filler_seed, double c)
{
    std::vector<std::string> failed;
    if (lambda < 1) failed.push_back("lambda >= 1");
    if (S < lambda) failed.push_back("lambda <= S");
    if (S > M - 1) failed.push_back("S <= M - 1");
    if (!(alpha > 0.0)) failed.push_back("alpha > 0");
    if (!(omega0 >= 0.0 && omega0 < 1.0)) failed.push_back("omega0 in [0,1)");
    if (!failed.empty()) {
        throw PreconditionError(std::move(failed));
    }

    const auto cluster = arithmetic_progression(omega0, lambda, alpha, M);
    std::vector<double> points(cluster.begin(), cluster.end());
    points.reserve(S);

    const double min_gap = 2.0 / M;
    Rng rng(filler_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int max_attempts = 10000 * std::max(1, S - lambda);
    int attempts = 0;
    while (static_cast<int>(points.size()) < S) {
        if (++attempts > max_attempts) {
            throw InfeasibleSpec("upper_bound_witness: could not place " + std::to_string(S - lambda) +
                                 " filler points at mutual distance >= 2/M");
        }
        const double p = unit(rng);
        const bool clear = std::all_of(points.begin(), points.end(),
                                       [&](double q) { return torus_distance(p, q) >= min_gap; });
        if (clear) {
            points.push_back(p);
        }
    }

    UpperBoundWitness w{SupportSet(std::move(points)), 0.0, false, c / std::sqrt(M + 1.0)};
    w.sigma_min = fourier_sigma_min(w.support, M);
    w.alpha_in_regime = alpha <= w.alpha_limit;
    return w;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows)
{
    os << "alpha,M,S,lambda_max,A,sigma_min_exact,lower_bound,upper_bound,seed\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%d,%d,%.17g,%.17g,%.17g,%llu\n", r.alpha, r.M, r.S,
                      r.lambda_max, r.A, r.sigma_min_exact, r.lower_bound, r.upper_bound,
                      static_cast<unsigned long long>(r.seed));
        os << buf;
    }
}

} // namespace srmusic
