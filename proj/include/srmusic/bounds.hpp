#ifndef SRMUSIC_BOUNDS_HPP
#define SRMUSIC_BOUNDS_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "srmusic/torus.hpp"

namespace srmusic
{

/// Exact sigma_min of the (M+1) x S Fourier matrix on `omega`.
double fourier_sigma_min(const SupportSet& omega, int M);

/// omega0 + {0, alpha/M, ..., (lambda-1) alpha/M} modulo one. Unlike a
/// generated clump, the span may exceed 1/M.
SupportSet arithmetic_progression(double omega0, int lambda, double alpha, int M);

///
/// Per-clump constants C_a and clump sizes lambda_a entering the
/// separated-clumps lower bound
///
///   sigma_min(Phi_M) >= sqrt(M) * ( sum_a (C_a alpha^{-(lambda_a - 1)})^2 )^{-1/2}.
///
/// The constants are not known in closed form; fit_clump_constants
/// calibrates them against exact singular values.
///
struct ClumpBoundTerms
{
    std::vector<double> constants;
    std::vector<int> clump_sizes;
    double alpha = 1.0;
    int M = 1;

    void validate() const;
};

double lower_bound_value(const ClumpBoundTerms& terms);

/// Throws PreconditionError when M < S^2 unless `allow_small_M`.
void require_m_at_least_s_squared(int M, int S, bool allow_small_M);

/// Calibrates C for a single-clump spec: C = max over alphas of
/// sqrt(M) alpha^{lambda-1} / sigma_min, so the bound holds on every sample.
/// The spec's own alpha is replaced by each sweep value.
ClumpBoundTerms fit_clump_constants(const ClumpSpec& spec, std::span<const double> alphas, std::uint64_t seed = 0);

struct ScalingSample
{
    double alpha = 0.0;
    double sigma_min = 0.0;
};

/// OLS fit of log(sigma_min) against log(alpha).
struct ScalingFit
{
    std::vector<ScalingSample> samples; // alpha strictly decreasing
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;

    /// Fits with r^2 below this are flagged unreliable in reports.
    static constexpr double reliable_r_squared = 0.98;
    bool reliable() const noexcept { return r_squared >= reliable_r_squared; }
};

ScalingFit fit_scaling_exponent(std::span<const ScalingSample> samples);

/// Sweeps alpha over a clump spec, returning exact sigma_min per alpha.
/// A single-clump spec is evaluated on the bare arithmetic progression
/// (anchored at the spec's anchor, or at a seeded uniform offset), so alphas
/// with alpha (lambda-1) >= 1 are allowed there.
std::vector<ScalingSample> sigma_min_sweep(const ClumpSpec& spec, std::span<const double> alphas, std::uint64_t seed);

struct UpperBoundWitness
{
    SupportSet support;
    double sigma_min = 0.0;
    /// alpha <= c (M+1)^{-1/2}; reported rather than enforced.
    bool alpha_in_regime = false;
    double alpha_limit = 0.0;
};

///
/// Builds a support of S points containing the lambda-term progression
/// omega0 + {0, alpha/M, ..., (lambda-1) alpha/M} plus S - lambda filler
/// points at least 2/M from the progression and from each other.
///
UpperBoundWitness upper_bound_witness(int lambda, double alpha, int M, int S, double omega0,
                                      std::uint64_t filler_seed, double c = 1.0);

/// One row of a sweep CSV. NaN marks a bound that does not apply.
struct SweepRow
{
    double alpha = 0.0;
    int M = 0;
    int S = 0;
    int lambda_max = 0;
    int A = 0;
    double sigma_min_exact = 0.0;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    std::uint64_t seed = 0;
};

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);

} // namespace srmusic

#endif // SRMUSIC_BOUNDS_HPP
