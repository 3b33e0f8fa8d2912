#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "srmusic/bounds.hpp"
#include "srmusic/errors.hpp"
#include "srmusic/fourier.hpp"

using namespace srmusic;

namespace
{

ClumpSpec single_clump(int lambda, double alpha, int M)
{
    ClumpSpec spec;
    spec.num_clumps = 1;
    spec.clump_sizes = {lambda};
    spec.alpha = alpha;
    spec.M = M;
    spec.anchors = std::vector<double>{0.3};
    return spec;
}

const std::vector<double> sweep_alphas{0.5, 0.35, 0.25, 0.18, 0.12, 0.08};

} // namespace

TEST_CASE("lower_bound_value examples")
{
    ClumpBoundTerms t{{1.0}, {1}, 0.37, 100};
    CHECK(lower_bound_value(t) == doctest::Approx(10.0));
    t = {{1.0}, {2}, 0.5, 100};
    CHECK(lower_bound_value(t) == doctest::Approx(5.0));
    t = {{1.0, 1.0}, {2, 3}, 0.5, 100};
    CHECK(lower_bound_value(t) == doctest::Approx(10.0 / std::sqrt(20.0)));
    t = {{1.0}, {2, 3}, 0.5, 100};
    CHECK_THROWS_AS(lower_bound_value(t), InvalidInput);
    t = {{-1.0}, {2}, 0.5, 100};
    CHECK_THROWS_AS(lower_bound_value(t), InvalidInput);
}

TEST_CASE("fit_clump_constants")
{
    SUBCASE("singleton has C = sqrt(M/(M+1))")
    {
        const auto t = fit_clump_constants(single_clump(1, 0.5, 100), sweep_alphas);
        REQUIRE(t.constants.size() == 1);
        CHECK(t.constants[0] == doctest::Approx(std::sqrt(100.0 / 101.0)));
    }
    SUBCASE("pair at M = 1000 has a moderate constant and the bound holds")
    {
        const std::vector<double> alphas{0.5, 0.35, 0.25, 0.18, 0.12, 0.08, 0.05};
        const auto spec = single_clump(2, 0.5, 1000);
        const auto t = fit_clump_constants(spec, alphas);
        CHECK(t.constants[0] >= 0.1);
        CHECK(t.constants[0] <= 10.0);
        // regression value from the exact-SVD calibration
        CHECK(t.constants[0] == doctest::Approx(0.8283).epsilon(1e-3));
        for (const auto& s : sigma_min_sweep(spec, alphas, 0)) {
            ClumpBoundTerms at = t;
            at.alpha = s.alpha;
            CHECK(lower_bound_value(at) <= s.sigma_min * (1 + 1e-12));
        }
    }
    CHECK_THROWS_AS(fit_clump_constants(single_clump(2, 0.5, 100), std::vector<double>{0.5, 0.3, 0.2}),
                    InvalidInput);
    ClumpSpec two = single_clump(2, 0.5, 100);
    two.num_clumps = 2;
    two.clump_sizes = {2, 1};
    two.beta = 5;
    two.anchors.reset();
    CHECK_THROWS_AS(fit_clump_constants(two, sweep_alphas), InvalidInput);
}

TEST_CASE("require_m_at_least_s_squared")
{
    CHECK_NOTHROW(require_m_at_least_s_squared(16, 4, false));
    CHECK_THROWS_AS(require_m_at_least_s_squared(15, 4, false), PreconditionError);
    CHECK_NOTHROW(require_m_at_least_s_squared(15, 4, true));
}

TEST_CASE("fit_scaling_exponent on exact power laws")
{
    std::vector<ScalingSample> s;
    for (double a : {0.1, 0.5, 0.2, 0.05, 0.3}) s.push_back({a, 7.0 * a * a});
    const auto fit = fit_scaling_exponent(s);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(std::log(7.0)));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK(fit.reliable());
    for (std::size_t i = 1; i < fit.samples.size(); ++i) CHECK(fit.samples[i].alpha < fit.samples[i - 1].alpha);

    s.resize(3);
    CHECK_THROWS_AS(fit_scaling_exponent(s), InvalidInput);
    std::vector<ScalingSample> bad{{0.5, 1}, {0.4, 1}, {0.3, 0.0}, {0.2, 1}};
    CHECK_THROWS_AS(fit_scaling_exponent(bad), DomainError);
    std::vector<ScalingSample> big{{1.5, 1}, {0.4, 1}, {0.3, 1}, {0.2, 1}};
    CHECK_THROWS_AS(fit_scaling_exponent(big), DomainError);
    std::vector<ScalingSample> dup{{0.5, 1}, {0.5, 2}, {0.3, 1}, {0.2, 1}};
    CHECK_THROWS_AS(fit_scaling_exponent(dup), InvalidInput);
}

TEST_CASE("noisy fits are flagged unreliable")
{
    std::vector<ScalingSample> s{{0.5, 1.0}, {0.4, 3.0}, {0.3, 0.5}, {0.2, 2.0}, {0.1, 0.8}};
    CHECK_FALSE(fit_scaling_exponent(s).reliable());
}

TEST_CASE("single clump of three has slope near two")
{
    const auto samples = sigma_min_sweep(single_clump(3, 0.5, 1000), sweep_alphas, 0);
    const auto fit = fit_scaling_exponent(samples);
    CHECK(fit.slope >= 1.7);
    CHECK(fit.slope <= 2.3);
}

TEST_CASE("arithmetic_progression")
{
    const auto p = arithmetic_progression(0.999, 3, 0.5, 1000);
    REQUIRE(p.size() == 3);
    CHECK(p[0] < 1e-12);
    CHECK(p[1] == doctest::Approx(0.999));
    CHECK(p[2] == doctest::Approx(0.9995));
    // wider than 1/M is allowed for a bare progression
    CHECK(arithmetic_progression(0.1, 4, 0.5, 1000).size() == 4);
    CHECK_THROWS_AS(arithmetic_progression(0.1, 3, 0.0, 100), InvalidInput);
}

TEST_CASE("sigma_min_sweep matches the Gram oracle")
{
    const auto spec = single_clump(3, 0.5, 200);
    const std::vector<double> alphas{0.5, 0.3};
    const auto samples = sigma_min_sweep(spec, alphas, 0);
    for (const auto& s : samples) {
        const std::vector<double> pts{0.3, 0.3 + s.alpha / 200, 0.3 + 2 * s.alpha / 200};
        CHECK(s.sigma_min == doctest::Approx(oracle::gram_sigma_min(pts, 200)).epsilon(1e-6));
    }
}

TEST_CASE("clump sigma_min is an l2 aggregate of per-clump values")
{
    // beta-condition for lambda = 2, S = 4, alpha = 0.5 asks beta >= 320, met at M = 2000
    const int M = 2000;
    ClumpSpec spec;
    spec.num_clumps = 2;
    spec.clump_sizes = {2, 2};
    spec.alpha = 0.5;
    spec.beta = 400;
    spec.M = M;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        const double a0 = u(rng) * 0.5;
        spec.anchors = std::vector<double>{a0, a0 + 0.5};
        const auto g = generate_clumps(spec, static_cast<std::uint64_t>(t));
        CHECK(check_beta_condition(g.partition, 4, spec.alpha).satisfied);
        double inv2 = 0.0;
        for (const auto& c : g.partition.clumps) {
            std::vector<double> pts;
            for (std::size_t k = 0; k < c.size; ++k) pts.push_back(g.support[c.index(k, 4)]);
            const double s = fourier_sigma_min(SupportSet(pts), M);
            inv2 += 1.0 / (s * s);
        }
        const double ratio = fourier_sigma_min(g.support, M) * std::sqrt(inv2);
        CHECK(ratio >= 0.25);
        CHECK(ratio <= 4.0);
    }
}

TEST_CASE("upper_bound_witness")
{
    SUBCASE("no fillers reduces to a single clump")
    {
        const auto w = upper_bound_witness(3, 0.04, 400, 3, 0.3, 0);
        const auto g = generate_clumps(single_clump(3, 0.04, 400), 0);
        REQUIRE(w.support.size() == 3);
        for (std::size_t i = 0; i < 3; ++i) CHECK(w.support[i] == doctest::Approx(g.support[i]).epsilon(1e-12));
        CHECK(w.sigma_min == doctest::Approx(fourier_sigma_min(g.support, 400)));
    }
    SUBCASE("fillers are well separated")
    {
        const int M = 400;
        const auto w = upper_bound_witness(2, 0.03, M, 4, 0.1, 17);
        REQUIRE(w.support.size() == 4);
        CHECK(w.alpha_in_regime);
        CHECK(w.alpha_limit == doctest::Approx(1.0 / std::sqrt(401.0)));
        int close = 0;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i + 1; j < 4; ++j)
                if (torus_distance(w.support[i], w.support[j]) < 2.0 / M - 1e-12) ++close;
        CHECK(close == 1);
    }
    SUBCASE("pair slope near one")
    {
        std::vector<ScalingSample> s;
        for (double a : {0.045, 0.03, 0.02, 0.013, 0.009, 0.006}) {
            s.push_back({a, upper_bound_witness(2, a, 400, 2, 0.2, 0).sigma_min});
        }
        const auto fit = fit_scaling_exponent(s);
        CHECK(fit.slope >= 0.8);
        CHECK(fit.slope <= 1.2);
    }
    SUBCASE("at fixed alpha sigma_min scales like sqrt(M), not like a constant")
    {
        const double alpha = 0.01;
        std::vector<double> normalized;
        double prev = 0.0;
        for (int M : {400, 1600, 6400}) {
            const auto w = upper_bound_witness(2, alpha, M, 2, 0.5, 0);
            CHECK(w.alpha_in_regime);
            CHECK(w.sigma_min > 1.9 * prev);
            prev = w.sigma_min;
            normalized.push_back(w.sigma_min / (std::sqrt(M + 1.0) * alpha));
        }
        for (double r : normalized) CHECK(r == doctest::Approx(normalized.front()).epsilon(0.01));
    }
    CHECK_THROWS_AS(upper_bound_witness(3, 0.1, 400, 2, 0.1, 0), PreconditionError);
    CHECK_THROWS_AS(upper_bound_witness(2, 0.1, 40, 30, 0.1, 0), InfeasibleSpec);
    CHECK_THROWS_AS(upper_bound_witness(2, 0.1, 10, 12, 0.1, 0), PreconditionError);
    CHECK_FALSE(upper_bound_witness(2, 0.2, 400, 2, 0.1, 0).alpha_in_regime);
}

TEST_CASE("sweep CSV layout")
{
    std::vector<SweepRow> rows{{0.5, 100, 2, 2, 1, 3.5, 1.25, std::nan(""), 7}};
    std::ostringstream os;
    write_sweep_csv(os, rows);
    const auto text = os.str();
    CHECK(text.rfind("alpha,M,S,lambda_max,A,sigma_min_exact,lower_bound,upper_bound,seed\n", 0) == 0);
    CHECK(text.find("0.5,100,2,2,1,3.5,1.25,nan,7") != std::string::npos);
}
