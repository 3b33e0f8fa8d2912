#include "srmusic/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "srmusic/errors.hpp"
#include "srmusic/fourier.hpp"
#include "srmusic/rng.hpp"

namespace srmusic
{

std::string_view to_string(NoiseKind kind) noexcept
{
    return kind == NoiseKind::Real ? "real" : "complex-circular";
}

NoiseKind noise_kind_from_string(std::string_view name)
{
    if (name == "real") return NoiseKind::Real;
    if (name == "complex-circular") return NoiseKind::ComplexCircular;
    throw InvalidInput("unknown noise kind '" + std::string(name) + "'");
}

CVectorXd sample_noise(const NoiseSpec& spec, Index M)
{
    if (!(spec.sigma >= 0.0) || M < 0) {
        throw InvalidInput("sample_noise: need sigma >= 0 and M >= 0");
    }
    Rng rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CVectorXd eta(M + 1);
    if (spec.kind == NoiseKind::Real) {
        for (Index m = 0; m <= M; ++m) {
            eta(m) = {spec.sigma * gauss(rng), 0.0};
        }
    } else {
        const double s = spec.sigma / std::sqrt(2.0);
        for (Index m = 0; m <= M; ++m) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            eta(m) = {s * re, s * im};
        }
    }
    return eta;
}

Index concentration_constant(Index M, Index L)
{
    if (L < 0 || L > M) {
        throw InvalidInput("concentration_constant: need 0 <= L <= M");
    }
    return std::max(L + 1, M - L + 1);
}

double expectation_bound(double sigma, Index M, Index L)
{
    const auto C = static_cast<double>(concentration_constant(M, L));
    return sigma * std::sqrt(2.0 * C * std::log(static_cast<double>(M) + 2.0));
}

double tail_bound(double t, double sigma, Index M, Index L)
{
    if (!(t > 0.0)) {
        throw InvalidInput("tail_bound: t must be positive");
    }
    const auto C = static_cast<double>(concentration_constant(M, L));
    const double e = -(t * t) / (2.0 * sigma * sigma * C);
    return std::min(1.0, (static_cast<double>(M) + 2.0) * std::exp(e));
}

double stability_constant(Index M, double nu)
{
    const double m = static_cast<double>(M);
    return m / (32.0 * std::sqrt(nu * (m + 2.0) * std::log(m + 2.0)));
}

double noise_threshold(Index M, double nu, double epsilon, const ClumpBoundTerms& terms)
{
    terms.validate();
    long long S = 0;
    for (int l : terms.clump_sizes) S += l;

    std::vector<std::string> failed;
    if (M % 2 != 0) failed.push_back("M even (M = " + std::to_string(M) + ")");
    if (M < 2 * S * S) failed.push_back("M >= 2 S^2 (M = " + std::to_string(M) + ", S = " + std::to_string(S) + ")");
    if (!(nu > 1.0)) failed.push_back("nu > 1");
    if (!(epsilon > 0.0)) failed.push_back("epsilon > 0");
    if (!failed.empty()) {
        throw PreconditionError(std::move(failed));
    }

    double sum = 0.0;
    for (std::size_t a = 0; a < terms.constants.size(); ++a) {
        const double c = terms.constants[a];
        sum += c * c * std::pow(terms.alpha, -2.0 * (terms.clump_sizes[a] - 1));
    }
    return stability_constant(M, nu) * epsilon / sum;
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z)
{
    if (trials == 0) {
        return {0.0, 1.0};
    }
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

ConcentrationReport run_concentration(Index M, Index L, double sigma, NoiseKind kind, std::size_t trials,
                                      std::uint64_t base_seed, double tail_factor,
                                      std::vector<ConcentrationTrial>* per_trial)
{
    if (trials == 0 || !(sigma > 0.0)) {
        throw InvalidInput("run_concentration: need trials >= 1 and sigma > 0");
    }
    ConcentrationReport rep;
    rep.kind = kind;
    rep.M = M;
    rep.L = L;
    rep.sigma = sigma;
    rep.trials = trials;
    rep.expectation_bound = expectation_bound(sigma, M, L);
    rep.tail_t = tail_factor * rep.expectation_bound;
    rep.tail_bound = tail_bound(rep.tail_t, sigma, M, L);

    double sum = 0.0;
    std::size_t exceed = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        const auto seed = derive_seed(base_seed, {i});
        const auto eta = sample_noise({sigma, kind, seed}, M);
        const double n = spectral_norm(hankel(eta, L));
        sum += n;
        exceed += n >= rep.tail_t ? 1 : 0;
        if (per_trial) {
            per_trial->push_back({i, seed, n});
        }
    }
    rep.empirical_mean_norm = sum / static_cast<double>(trials);
    rep.empirical_tail_prob = static_cast<double>(exceed) / static_cast<double>(trials);
    rep.tail_interval = wilson_interval(exceed, trials);
    return rep;
}

} // namespace srmusic
