#ifndef SRMUSIC_NOISE_HPP
#define SRMUSIC_NOISE_HPP

#include <cstdint>
#include <string_view>
#include <vector>

#include "srmusic/bounds.hpp"
#include "srmusic/types.hpp"

namespace srmusic
{

enum class NoiseKind
{
    ComplexCircular, // Re, Im independent N(0, sigma^2/2): E|eta_m|^2 = sigma^2
    Real             // N(0, sigma^2)
};

std::string_view to_string(NoiseKind kind) noexcept;
NoiseKind noise_kind_from_string(std::string_view name);

struct NoiseSpec
{
    double sigma = 0.0;
    NoiseKind kind = NoiseKind::ComplexCircular;
    std::uint64_t seed = 0;
};

/// M+1 i.i.d. Gaussian entries; identical seeds give identical vectors.
CVectorXd sample_noise(const NoiseSpec& spec, Index M);

/// C(M, L) = max(L+1, M-L+1).
Index concentration_constant(Index M, Index L);

/// sigma sqrt(2 C(M,L) ln(M+2)), a bound on E|H(eta)|_2.
double expectation_bound(double sigma, Index M, Index L);

/// min(1, (M+2) exp(-t^2 / (2 sigma^2 C(M,L)))), a bound on P(|H(eta)|_2 >= t).
double tail_bound(double t, double sigma, Index M, Index L);

/// M / (32 sqrt(nu (M+2) ln(M+2))).
double stability_constant(Index M, double nu);

///
/// Admissible noise-to-signal level sigma/x_min below which the correlation
/// perturbation stays within epsilon with probability >= 1 - (M+2)^{-(nu-1)}:
///
///   stability_constant(M, nu) * ( sum_a c_a^2 alpha^{-2(lambda_a-1)} )^{-1} * epsilon
///
/// Requires M even, M >= 2 S^2, nu > 1 and epsilon > 0; every failed
/// hypothesis is listed in the thrown PreconditionError.
///
double noise_threshold(Index M, double nu, double epsilon, const ClumpBoundTerms& terms);

struct WilsonInterval
{
    double lower = 0.0;
    double upper = 1.0;
};

/// Wilson score interval; z = 1.96 gives 95%.
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

struct ConcentrationReport
{
    NoiseKind kind = NoiseKind::Real;
    Index M = 0;
    Index L = 0;
    double sigma = 0.0;
    std::size_t trials = 0;
    double empirical_mean_norm = 0.0;
    double expectation_bound = 0.0;
    double tail_t = 0.0;
    double empirical_tail_prob = 0.0;
    WilsonInterval tail_interval;
    double tail_bound = 0.0;

    bool mean_within_bound() const noexcept { return empirical_mean_norm <= expectation_bound; }
    bool tail_within_bound() const noexcept { return empirical_tail_prob <= tail_bound; }
};

struct ConcentrationTrial
{
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double hankel_norm = 0.0;
};

/// Spectral norm of H(eta) over `trials` draws. Trial i uses the seed
/// derive_seed(base_seed, {i}). The tail is evaluated at
/// t = tail_factor * expectation_bound.
ConcentrationReport run_concentration(Index M, Index L, double sigma, NoiseKind kind, std::size_t trials,
                                      std::uint64_t base_seed, double tail_factor = 1.2,
                                      std::vector<ConcentrationTrial>* per_trial = nullptr);

} // namespace srmusic

#endif // SRMUSIC_NOISE_HPP
