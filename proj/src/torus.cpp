#include "srmusic/torus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

#include "srmusic/errors.hpp"
#include "srmusic/rng.hpp"

namespace srmusic
{

namespace
{

bool on_torus(double x) noexcept { return x >= 0.0 && x < 1.0; }

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double max_spacing_factor(const ClumpSpec& spec) { return 1.0 + spec.jitter / 4.0; }

} // namespace

double wrap_unit(double x) noexcept
{
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

double torus_distance(double a, double b)
{
    if (!on_torus(a) || !on_torus(b)) {
        throw DomainError("torus_distance: points must lie in [0,1), got " + fmt(a) + ", " + fmt(b));
    }
    const double d = std::abs(a - b);
    return std::min(d, 1.0 - d);
}

SupportSet::SupportSet(std::vector<double> points) : points_(std::move(points))
{
    if (points_.empty()) {
        throw InvalidInput("SupportSet: at least one point is required");
    }
    for (double p : points_) {
        if (!on_torus(p)) {
            throw DomainError("SupportSet: point " + fmt(p) + " outside [0,1)");
        }
    }
    std::sort(points_.begin(), points_.end());
    if (std::adjacent_find(points_.begin(), points_.end()) != points_.end()) {
        throw InvalidInput("SupportSet: duplicate points");
    }
}

SupportSet SupportSet::rotated(double c) const
{
    std::vector<double> out(points_.size());
    std::transform(points_.begin(), points_.end(), out.begin(), [c](double p) { return wrap_unit(p + c); });
    return SupportSet(std::move(out));
}

SupportSet SupportSet::reflected() const
{
    std::vector<double> out(points_.size());
    std::transform(points_.begin(), points_.end(), out.begin(), [](double p) { return wrap_unit(-p); });
    return SupportSet(std::move(out));
}

double min_separation(const SupportSet& omega)
{
    const auto S = omega.size();
    if (S < 2) {
        throw InvalidInput("min_separation: undefined for fewer than two points");
    }
    double delta = 1.0 - omega[S - 1] + omega[0];
    for (std::size_t i = 0; i + 1 < S; ++i) {
        delta = std::min(delta, omega[i + 1] - omega[i]);
    }
    return std::min(delta, 0.5);
}

double super_resolution_factor(int M, double delta)
{
    if (M < 1 || !(delta > 0.0) || delta > 0.5) {
        throw DomainError("super_resolution_factor: need M >= 1 and 0 < delta <= 1/2");
    }
    return 1.0 / (M * delta);
}

int ClumpSpec::total_points() const noexcept
{
    return std::accumulate(clump_sizes.begin(), clump_sizes.end(), 0);
}

int ClumpSpec::lambda_max() const noexcept
{
    return clump_sizes.empty() ? 0 : *std::max_element(clump_sizes.begin(), clump_sizes.end());
}

void ClumpSpec::validate() const
{
    if (num_clumps < 1) {
        throw InvalidInput("ClumpSpec: num_clumps must be positive");
    }
    if (clump_sizes.size() != static_cast<std::size_t>(num_clumps)) {
        throw InvalidInput("ClumpSpec: clump_sizes must have num_clumps entries");
    }
    if (std::any_of(clump_sizes.begin(), clump_sizes.end(), [](int l) { return l < 1; })) {
        throw InvalidInput("ClumpSpec: clump sizes must be positive");
    }
    if (!(alpha > 0.0) || !(beta > 0.0) || M < 1) {
        throw InvalidInput("ClumpSpec: need alpha > 0, beta > 0, M >= 1");
    }
    if (!(jitter >= 0.0 && jitter <= 1.0)) {
        throw InvalidInput("ClumpSpec: jitter must lie in [0,1]");
    }
    if (num_clumps > 1 && !(beta > 1.0)) {
        throw InvalidInput("ClumpSpec: beta must exceed 1 when there are several clumps");
    }
    for (int l : clump_sizes) {
        if (alpha * (l - 1) * max_spacing_factor(*this) >= 1.0) {
            throw InfeasibleSpec("ClumpSpec: clump of size " + std::to_string(l) +
                                 " does not fit in an interval of length 1/M (alpha*(lambda-1) >= 1)");
        }
    }
    if (anchors) {
        if (anchors->size() != static_cast<std::size_t>(num_clumps)) {
            throw InvalidInput("ClumpSpec: anchors must have num_clumps entries");
        }
        for (double a : *anchors) {
            if (!on_torus(a)) {
                throw DomainError("ClumpSpec: anchor " + fmt(a) + " outside [0,1)");
            }
        }
    } else if (num_clumps > 1) {
        double used = num_clumps * beta / M;
        for (int l : clump_sizes) {
            used += (l - 1) * alpha * max_spacing_factor(*this) / M;
        }
        if (used > 1.0) {
            throw InfeasibleSpec("ClumpSpec: circumference budget exceeded: sum of clump diameters plus "
                                 "A*beta/M is " + fmt(used) + " > 1");
        }
    }
}

std::vector<int> ClumpPartition::clump_sizes() const
{
    std::vector<int> sizes;
    sizes.reserve(clumps.size());
    for (const auto& c : clumps) {
        sizes.push_back(static_cast<int>(c.size));
    }
    return sizes;
}

int ClumpPartition::lambda_max() const noexcept
{
    std::size_t m = 0;
    for (const auto& c : clumps) {
        m = std::max(m, c.size);
    }
    return static_cast<int>(m);
}

std::vector<ClumpRange> partition_runs(const SupportSet& omega, int M)
{
    const std::size_t S = omega.size();
    if (S == 1) {
        return {ClumpRange{0, 1}};
    }
    // Cut the circle after the largest gap.
    std::size_t cut = 0;
    double largest = 1.0 - omega[S - 1] + omega[0];
    for (std::size_t i = 0; i + 1 < S; ++i) {
        const double g = omega[i + 1] - omega[i];
        if (g > largest) {
            largest = g;
            cut = i + 1;
        }
    }
    auto unwrapped = [&](std::size_t k) {
        const std::size_t i = cut + k;
        return i < S ? omega[i] : omega[i - S] + 1.0;
    };

    const double width = (1.0 + geometry_tolerance) / M;
    std::vector<ClumpRange> runs;
    std::size_t k = 0;
    while (k < S) {
        const double start = unwrapped(k);
        std::size_t len = 1;
        while (k + len < S && unwrapped(k + len) - start <= width) {
            ++len;
        }
        runs.push_back(ClumpRange{(cut + k) % S, len});
        k += len;
    }
    return runs;
}

ClumpPartition validate_clumps(const SupportSet& omega, int M, double alpha, double beta)
{
    if (M < 1 || !(alpha > 0.0) || !(beta > 0.0)) {
        throw InvalidInput("validate_clumps: need M >= 1, alpha > 0, beta > 0");
    }
    const std::size_t S = omega.size();
    ClumpPartition part;
    part.clumps = partition_runs(omega, M);
    part.M = M;
    part.S = S;
    part.alpha = alpha;
    part.beta = beta;
    part.observed_beta = std::numeric_limits<double>::infinity();

    if (S >= 2) {
        const double delta = min_separation(omega);
        if (delta * M < alpha * (1.0 - geometry_tolerance)) {
            throw ClumpViolation(ClumpViolation::Kind::Separation,
                                 "separation violation: M*Delta = " + fmt(delta * M) + " < alpha = " + fmt(alpha));
        }
    }
    for (const auto& c : part.clumps) {
        if (alpha * static_cast<double>(c.size - 1) >= 1.0) {
            throw ClumpViolation(ClumpViolation::Kind::ClumpDiameter,
                                 "clump-diameter violation: clump of size " + std::to_string(c.size) +
                                     " has alpha*(lambda-1) >= 1");
        }
    }
    const auto A = part.clumps.size();
    for (std::size_t a = 0; a < A; ++a) {
        for (std::size_t b = a + 1; b < A; ++b) {
            double d = 1.0;
            for (std::size_t i = 0; i < part.clumps[a].size; ++i) {
                for (std::size_t j = 0; j < part.clumps[b].size; ++j) {
                    d = std::min(d, torus_distance(omega[part.clumps[a].index(i, S)],
                                                   omega[part.clumps[b].index(j, S)]));
                }
            }
            part.observed_beta = std::min(part.observed_beta, d * M);
        }
    }
    if (A > 1 && part.observed_beta < beta * (1.0 - geometry_tolerance)) {
        throw ClumpViolation(ClumpViolation::Kind::InterClumpGap,
                             "inter-clump-gap violation: M*dist = " + fmt(part.observed_beta) +
                                 " < beta = " + fmt(beta));
    }
    return part;
}

GeneratedClumps generate_clumps(const ClumpSpec& spec, std::uint64_t seed)
{
    spec.validate();
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double step = spec.alpha / spec.M;
    std::vector<std::vector<double>> offsets(spec.num_clumps);
    std::vector<double> diameters(spec.num_clumps);
    for (int a = 0; a < spec.num_clumps; ++a) {
        auto& off = offsets[a];
        off.push_back(0.0);
        for (int k = 1; k < spec.clump_sizes[a]; ++k) {
            double s = step;
            if (spec.jitter > 0.0) {
                s += unit(rng) * spec.jitter * step / 4.0;
            }
            off.push_back(off.back() + s);
        }
        diameters[a] = off.back();
    }

    std::vector<double> anchors;
    if (spec.anchors) {
        anchors = *spec.anchors;
    } else if (spec.num_clumps == 1) {
        anchors.push_back(unit(rng));
    } else {
        const double gap = spec.beta / spec.M;
        double slack = 1.0 - spec.num_clumps * gap;
        for (double d : diameters) {
            slack -= d;
        }
        // Uniform split of the residual slack among the A gaps.
        std::vector<double> cuts(spec.num_clumps - 1);
        for (auto& c : cuts) {
            c = unit(rng);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.insert(cuts.begin(), 0.0);
        cuts.push_back(1.0);
        double pos = unit(rng);
        for (int a = 0; a < spec.num_clumps; ++a) {
            anchors.push_back(wrap_unit(pos));
            pos += diameters[a] + gap + slack * (cuts[a + 1] - cuts[a]);
        }
    }

    std::vector<double> points;
    points.reserve(spec.total_points());
    for (int a = 0; a < spec.num_clumps; ++a) {
        for (double o : offsets[a]) {
            points.push_back(wrap_unit(anchors[a] + o));
        }
    }

    try {
        SupportSet support(std::move(points));
        auto partition = validate_clumps(support, spec.M, spec.alpha, spec.beta);
        if (partition.num_clumps() != static_cast<std::size_t>(spec.num_clumps)) {
            throw InfeasibleSpec("generate_clumps: anchors merge clumps (found " +
                                 std::to_string(partition.num_clumps()) + " clumps)");
        }
        return GeneratedClumps{std::move(support), std::move(partition)};
    } catch (const InfeasibleSpec&) {
        throw;
    } catch (const InvalidInput& e) {
        throw InfeasibleSpec(std::string("generate_clumps: anchors infeasible: ") + e.what());
    }
}

BetaCondition check_beta_condition(const ClumpPartition& partition, std::size_t S, double alpha)
{
    if (!(alpha > 0.0)) {
        throw InvalidInput("check_beta_condition: alpha must be positive");
    }
    double required = 0.0;
    for (const auto& c : partition.clumps) {
        const double l = static_cast<double>(c.size);
        required = std::max(required, 20.0 * std::sqrt(static_cast<double>(S)) * std::pow(l, 2.5) / std::sqrt(alpha));
    }
    const bool ok = partition.num_clumps() <= 1 || partition.beta >= required;
    return BetaCondition{required, ok};
}

} // namespace srmusic
