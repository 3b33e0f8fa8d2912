#ifndef SRMUSIC_TORUS_HPP
#define SRMUSIC_TORUS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace srmusic
{

/// Relative slack used when certifying geometric inequalities, so that
/// configurations built at exactly alpha/M spacing certify despite rounding.
inline constexpr double geometry_tolerance = 1e-9;

/// Maps any real onto the torus [0, 1).
double wrap_unit(double x) noexcept;

/// Wrap-around distance min(|a-b|, 1-|a-b|). Throws DomainError unless
/// both points lie in [0, 1).
double torus_distance(double a, double b);

///
/// Sorted, duplicate-free point set on the torus [0, 1).
///
class SupportSet
{
public:
    /// Sorts `points`; throws DomainError for points outside [0,1) and
    /// InvalidInput for an empty set or duplicates.
    explicit SupportSet(std::vector<double> points);

    std::size_t size() const noexcept { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    std::span<const double> points() const noexcept { return points_; }
    auto begin() const noexcept { return points_.begin(); }
    auto end() const noexcept { return points_.end(); }

    /// Every point shifted by `c` modulo one.
    SupportSet rotated(double c) const;
    /// The image under w -> -w modulo one.
    SupportSet reflected() const;

    friend bool operator==(const SupportSet&, const SupportSet&) = default;

private:
    std::vector<double> points_;
};

double min_separation(const SupportSet& omega);

/// SRF = 1 / (M * delta).
double super_resolution_factor(int M, double delta);

/// Generative description of a separated-clumps configuration.
struct ClumpSpec
{
    int num_clumps = 1;
    std::vector<int> clump_sizes{1};
    double alpha = 1.0;
    double beta = 1.0;
    int M = 1;
    std::optional<std::vector<double>> anchors;
    /// Each intra-clump spacing is alpha/M plus U[0, jitter * alpha/(4M)].
    double jitter = 0.0;

    int total_points() const noexcept;
    int lambda_max() const noexcept;
    /// Throws InvalidInput / InfeasibleSpec naming the first violated rule.
    void validate() const;

    friend bool operator==(const ClumpSpec&, const ClumpSpec&) = default;
};

/// Circular index range [start, start + size) modulo S into a SupportSet.
struct ClumpRange
{
    std::size_t start = 0;
    std::size_t size = 0;

    std::size_t index(std::size_t k, std::size_t S) const noexcept { return (start + k) % S; }
    friend bool operator==(const ClumpRange&, const ClumpRange&) = default;
};

struct ClumpPartition
{
    std::vector<ClumpRange> clumps;
    int M = 1;
    std::size_t S = 0;
    double alpha = 0.0;
    double beta = 0.0;
    /// M times the smallest inter-clump distance; +inf for a single clump.
    double observed_beta = 0.0;

    std::size_t num_clumps() const noexcept { return clumps.size(); }
    std::vector<int> clump_sizes() const;
    int lambda_max() const noexcept;
};

struct GeneratedClumps
{
    SupportSet support;
    ClumpPartition partition;
};

GeneratedClumps generate_clumps(const ClumpSpec& spec, std::uint64_t seed);

/// Greedy partition into maximal runs of diameter <= 1/M. The circle is cut
/// at the largest gap, so a clump may straddle 0. Certifies nothing.
std::vector<ClumpRange> partition_runs(const SupportSet& omega, int M);

/// Partitions with partition_runs and certifies the separated-clumps
/// conditions, throwing ClumpViolation for the first failed one.
ClumpPartition validate_clumps(const SupportSet& omega, int M, double alpha, double beta);

struct BetaCondition
{
    double required_beta = 0.0;
    bool satisfied = false;
};

/// required_beta = max_a 20 sqrt(S) lambda_a^(5/2) / sqrt(alpha).
/// Vacuously satisfied for a single clump.
BetaCondition check_beta_condition(const ClumpPartition& partition, std::size_t S, double alpha);

} // namespace srmusic

#endif // SRMUSIC_TORUS_HPP
