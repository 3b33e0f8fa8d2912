#ifndef SRMUSIC_HARNESS_HPP
#define SRMUSIC_HARNESS_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srmusic/noise.hpp"
#include "srmusic/rng.hpp"
#include "srmusic/torus.hpp"
#include "srmusic/types.hpp"

namespace srmusic
{

enum class ExperimentKind
{
    SigmaMinSweep,
    UpperBoundSweep,
    PerturbationCheck,
    Concentration,
    PhaseTransition
};

std::string_view to_string(ExperimentKind kind) noexcept;
ExperimentKind experiment_kind_from_string(std::string_view name);

struct AmplitudeModel
{
    enum class Type
    {
        Unit,            // x_j = 1
        RandomPhaseUnit, // |x_j| = 1, uniform phase
        RandomModulus    // |x_j| uniform in [low, high], uniform phase
    };

    Type type = Type::RandomPhaseUnit;
    double low = 1.0;
    double high = 1.0;

    /// Guaranteed lower bound on min_j |x_j|.
    double nominal_x_min() const noexcept { return type == Type::RandomModulus ? low : 1.0; }
    CVectorXd sample(Index S, Rng& rng) const;
    void validate() const;

    friend bool operator==(const AmplitudeModel&, const AmplitudeModel&) = default;
};

std::string_view to_string(AmplitudeModel::Type type) noexcept;
AmplitudeModel::Type amplitude_type_from_string(std::string_view name);

struct ExperimentConfig
{
    static constexpr int current_schema = 1;

    int schema = current_schema;
    ExperimentKind kind = ExperimentKind::PhaseTransition;
    ClumpSpec clump_spec;
    std::vector<double> alphas;
    std::vector<double> sigmas;
    int trials_per_cell = 1;
    int M = 100;
    int L = -1; // -1: floor(M/2)
    int S = 0;  // 0: total points of clump_spec
    int N = 0;  // 0: 16 M
    double nu = 2.0;
    double epsilon = 0.1;
    AmplitudeModel amplitude;
    std::uint64_t base_seed = 0;
    NoiseKind noise_kind = NoiseKind::ComplexCircular;
    bool refine = true;
    bool allow_small_M = false;
    /// Constant c of the regime alpha <= c (M+1)^{-1/2} for upper-bound sweeps.
    double upper_bound_c = 1.0;

    /// Copy with defaults filled in (L, S, N, clump_spec.M).
    ExperimentConfig resolved() const;
    /// Kind-specific checks on a resolved config.
    void validate() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// 16 hex digits of FNV-1a over the canonical JSON of the resolved config.
std::string config_hash(const ExperimentConfig& config);

struct ExperimentRecord
{
    std::string config_hash;
    std::size_t cell = 0;
    double alpha = 0.0;
    double sigma = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;

    int M = 0;
    int S = 0;
    int A = 0;
    int lambda_max = 0;
    double x_min = 0.0;
    double sigma_min = NAN;
    double lower_bound = NAN;
    double upper_bound = NAN;
    double hankel_norm = NAN;
    double sigma_min_L = NAN;
    double sigma_min_ML = NAN;
    double sup_diff = NAN;
    double wedin_bound = NAN;
    bool precondition_ok = false;
    double matched_error = NAN;
    /// Kind-specific: bound holds (sweeps, perturbation), alpha in regime
    /// (upper bound), match_supports < alpha/(2M) (phase transition).
    bool success = false;
    /// Phase transition only: grid sup |R_noisy - R| <= epsilon.
    bool correlation_success = false;
    std::string error;
    double wall_time = 0.0; // seconds; not persisted to CSV
};

/// Runs every cell of the campaign. `jobs` = 0 uses all hardware threads.
/// Records are ordered by cell index regardless of `jobs`.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config, unsigned jobs = 0);

void write_records_csv(std::ostream& os, ExperimentKind kind, std::span<const ExperimentRecord> records);

struct PhaseTransitionSummary
{
    std::vector<double> srfs;           // ascending
    std::vector<double> noise_levels;   // sigma / x_min, ascending
    std::vector<std::vector<double>> success_rate; // [srf][noise]
    std::vector<std::vector<WilsonInterval>> intervals;
    std::vector<std::vector<double>> correlation_rate;
    std::vector<std::vector<std::size_t>> trials;
    /// Per SRF: largest noise level up to which every cell succeeds with
    /// rate >= threshold; NaN if even the smallest level fails.
    std::vector<double> critical_noise;
    std::vector<double> critical_noise_correlation;
    double threshold = 0.9;
    std::optional<double> critical_slope;             // d log(noise) / d log(SRF)
    std::optional<double> critical_slope_correlation;
    bool monotone = true;                              // one-sided trend test at 95%
};

PhaseTransitionSummary phase_transition_summary(std::span<const ExperimentRecord> records, double x_min_nominal,
                                                double threshold = 0.9);

/// Writes <out_root>/<hash>/<kind>.csv and summary.json; returns the directory.
std::filesystem::path write_campaign(const std::filesystem::path& out_root, const ExperimentConfig& config,
                                     std::span<const ExperimentRecord> records);

} // namespace srmusic

#endif // SRMUSIC_HARNESS_HPP
