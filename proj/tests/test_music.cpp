#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "srmusic/errors.hpp"
#include "srmusic/music.hpp"

using namespace srmusic;
using cd = std::complex<double>;

namespace
{

CVectorXd unit_phases(std::mt19937_64& rng, Index S)
{
    std::uniform_real_distribution<double> ph(0.0, 1.0);
    CVectorXd x(S);
    for (Index j = 0; j < S; ++j) x(j) = std::polar(1.0, two_pi<double> * ph(rng));
    return x;
}

CMatrixXd random_unitary(std::mt19937_64& rng, Index n)
{
    std::normal_distribution<double> g;
    CMatrixXd A(n, n);
    for (Index i = 0; i < A.size(); ++i) A(i) = cd(g(rng), g(rng));
    return Eigen::HouseholderQR<CMatrixXd>(A).householderQ();
}

std::vector<double> values(const SupportSet& s) { return {s.begin(), s.end()}; }

} // namespace

TEST_CASE("imaging_function examples")
{
    // a first-coordinate noise space gives R = 1/sqrt(L+1) = 1/2 everywhere
    const Index L = 3;
    CMatrixXd W = CMatrixXd::Zero(L + 1, 1);
    W(0, 0) = 1.0;
    CHECK(noise_correlation(W, 0.0) == doctest::Approx(0.5));
    CHECK(imaging_function(W, 0.0) == doctest::Approx(2.0));

    const CMatrixXd full = CMatrixXd::Identity(L + 1, L + 1);
    CHECK(noise_correlation(full, 0.37) == doctest::Approx(1.0));
    CHECK(imaging_function(full, 0.37) == doctest::Approx(1.0));
}

TEST_CASE("noiseless correlation vanishes exactly on the support")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 30; ++t) {
        const int M = 40 + 2 * t;
        const int L = M / 2;
        const int S = 1 + t % 5;
        const auto pts = oracle::random_points(rng, S, 1.5 / M);
        const SupportSet omega(pts);
        const CVectorXd y = vandermonde(omega, M) * unit_phases(rng, S);
        const auto svd = svd_split(hankel(y, L), S);
        for (double w : omega) {
            CHECK(noise_correlation(svd.noise_space, w) <= 1e-8);
            CHECK(imaging_function(svd.noise_space, w) >= 1e8);
        }
        for (int k = 0; k < 50; ++k) {
            const double w = u(rng);
            const bool far = std::all_of(pts.begin(), pts.end(), [&](double p) { return oracle::circ(p, w) >= 0.5 / M; });
            if (far) CHECK(noise_correlation(svd.noise_space, w) > 0.0);
            const bool very_far = std::all_of(pts.begin(), pts.end(), [&](double p) { return oracle::circ(p, w) >= 2.0 / M; });
            if (very_far) CHECK(noise_correlation(svd.noise_space, w) > 0.1);
        }
    }
}

TEST_CASE("FFT grid matches direct projection")
{
    std::mt19937_64 rng(8);
    const int M = 30, L = 15, S = 3;
    const SupportSet omega(oracle::random_points(rng, S, 1.0 / M));
    const CVectorXd y = vandermonde(omega, M) * unit_phases(rng, S);
    const auto svd = svd_split(hankel(y, L), S);
    const auto grid = evaluate_grid(svd.noise_space, 16 * M);
    REQUIRE(grid.R.size() == 16 * M);
    for (Index k = 0; k < grid.resolution; ++k) {
        const double r = oracle::correlation_from_signal(svd.signal_space, grid.node(k));
        CHECK(grid.R[static_cast<std::size_t>(k)] == doctest::Approx(r).epsilon(1e-9).scale(1.0));
        CHECK(grid.R[static_cast<std::size_t>(k)] >= 0.0);
        CHECK(grid.R[static_cast<std::size_t>(k)] <= 1.0);
    }
    CHECK_THROWS_AS(evaluate_grid(svd.noise_space, L), InvalidInput);
}

TEST_CASE("correlation depends only on the noise subspace")
{
    std::mt19937_64 rng(13);
    const int M = 50, L = 25, S = 4;
    const SupportSet omega(oracle::random_points(rng, S, 0.8 / M));
    const CVectorXd y = vandermonde(omega, M) * unit_phases(rng, S);
    const auto svd = svd_split(hankel(y, L), S);
    const CMatrixXd W = svd.noise_space;
    const CMatrixXd W2 = W * random_unitary(rng, W.cols());
    CHECK(correlation_sup_diff(W, W, 800) == 0.0);
    CHECK(correlation_sup_diff(W, W2, 800) <= 1e-12);
    CHECK_THROWS_AS(correlation_sup_diff(W, W.topRows(10), 800), InvalidInput);
}

TEST_CASE("grid_local_maxima")
{
    const std::vector<double> a{0, 1, 1, 0, 2, 0};
    const auto pa = grid_local_maxima(a);
    REQUIRE(pa.size() == 2);
    CHECK(pa[0].position == doctest::Approx(1.5));
    CHECK(pa[0].value == 1.0);
    CHECK(pa[1].position == doctest::Approx(4.0));

    CHECK(grid_local_maxima(std::vector<double>(8, 3.0)).empty());

    const std::vector<double> b{3, 1, 1, 2};
    const auto pb = grid_local_maxima(b);
    REQUIRE(pb.size() == 1);
    CHECK(pb[0].position == doctest::Approx(0.0));

    const std::vector<double> c{5, 1, 2, 5};
    const auto pc = grid_local_maxima(c);
    REQUIRE(pc.size() == 1);
    CHECK(pc[0].position == doctest::Approx(3.5));
    CHECK(pc[0].value == 5.0);

    const std::vector<double> d{1, 2, 3, 4, 5};
    const auto pd = grid_local_maxima(d);
    REQUIRE(pd.size() == 1);
    CHECK(pd[0].position == doctest::Approx(4.0));
}

TEST_CASE("grid_local_maxima agrees with a naive scan on random data")
{
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> v(0, 4);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> x(static_cast<std::size_t>(3 + t % 20));
        for (auto& e : x) e = v(rng);
        // naive count of strict local maxima on runs
        const std::size_t n = x.size();
        std::size_t expected = 0;
        bool constant = std::all_of(x.begin(), x.end(), [&](double e) { return e == x[0]; });
        if (!constant) {
            for (std::size_t i = 0; i < n; ++i) {
                if (x[i] == x[(i + n - 1) % n]) continue; // count each run at its first element
                std::size_t j = i;
                while (x[(j + 1) % n] == x[i]) j = (j + 1) % n;
                if (x[i] > x[(i + n - 1) % n] && x[i] > x[(j + 1) % n]) ++expected;
            }
        }
        const auto peaks = grid_local_maxima(x);
        CHECK(peaks.size() == expected);
        for (const auto& p : peaks) {
            CHECK(p.position >= 0.0);
            CHECK(p.position < static_cast<double>(n));
        }
    }
}

TEST_CASE("music recovers a well separated pair on the grid")
{
    const int M = 20;
    const SupportSet omega({0.2, 0.7});
    const CVectorXd y = vandermonde(omega, M) * CVectorXd::Ones(2);
    MusicOptions opt{2, 10, default_grid(M), false};
    const auto est = music_estimate(y, opt);
    CHECK(est.recovered.size() == 2);
    CHECK(match_supports(omega, est.recovered) <= 1.0 / opt.N);
    CHECK_FALSE(est.refined);
    CHECK(est.peak_values.size() == 2);
    CHECK(est.grid.resolution == 320);
}

TEST_CASE("music recovers a clump at SRF 2.5 after refinement")
{
    const int M = 100;
    const SupportSet omega({0.5, 0.5 + 0.4 / M, 0.5 + 0.8 / M});
    std::mt19937_64 rng(3);
    const CVectorXd y = vandermonde(omega, M) * unit_phases(rng, 3);
    MusicOptions opt{3, 50, default_grid(M), true};
    const auto est = music_estimate(y, opt);
    CHECK(match_supports(omega, est.recovered) <= 1.0 / opt.N);
    CHECK(match_supports(omega, est.recovered) <= 1e-6);
    CHECK(est.refined);
}

TEST_CASE("amplitude scaling leaves MUSIC unchanged")
{
    std::mt19937_64 rng(44);
    for (int t = 0; t < 10; ++t) {
        const int M = 60;
        const int S = 1 + t % 4;
        const SupportSet omega(oracle::random_points(rng, S, 1.2 / M));
        const CVectorXd y = vandermonde(omega, M) * unit_phases(rng, S);
        const cd c = std::polar(0.1 + 3.0 * t, 0.3 * t);
        MusicOptions opt{S, M / 2, default_grid(M), false};
        const auto a = music_estimate(y, opt);
        const auto b = music_estimate(c * y, opt);
        CHECK(grid_sup_diff(a.grid, b.grid) <= 1e-9);
        CHECK(values(a.recovered) == values(b.recovered));
    }
}

TEST_CASE("music input validation")
{
    CVectorXd y = CVectorXd::Ones(21);
    CHECK_THROWS_AS(music_estimate(y, {0, 10, 320, false}), InvalidInput);
    CHECK_THROWS_AS(music_estimate(y, {3, 2, 320, false}), InvalidInput);
    CHECK_THROWS_AS(music_estimate(y, {2, 20, 320, false}), InvalidInput);
    CHECK_THROWS_AS(music_estimate(y, {1, 10, 100, false}), InvalidInput);

    // a flat imaging function has no peaks
    CVectorXd z = CVectorXd::Zero(3);
    z(0) = 1.0;
    try {
        music_estimate(z, {1, 1, 16, false});
        FAIL("expected underdetermined peaks");
    } catch (const UnderdeterminedPeaks& e) {
        CHECK(e.found() == 0);
        CHECK(e.required() == 1);
    }
}

TEST_CASE("wedin_bound examples")
{
    const auto zero = wedin_bound(0.0, 1.0, 1.0, 1.0);
    CHECK(zero.wedin_bound == 0.0);
    CHECK(zero.precondition_ok);
    const auto ok = wedin_bound(1.0, 1.0, 2.0, 2.0);
    CHECK(ok.precondition_ok);
    CHECK(ok.wedin_bound == doctest::Approx(0.5));
    const auto bad = wedin_bound(2.0, 1.0, 1.0, 1.0);
    CHECK_FALSE(bad.precondition_ok);
    CHECK(bad.wedin_bound == doctest::Approx(4.0));
    CHECK_THROWS_AS(wedin_bound(-1.0, 1.0, 1.0, 1.0), InvalidInput);
    CHECK_THROWS_AS(wedin_bound(1.0, 0.0, 1.0, 1.0), InvalidInput);
}

TEST_CASE("match_supports examples and errors")
{
    const SupportSet a({0.1, 0.9});
    CHECK(match_supports(a, a) == 0.0);
    CHECK(match_supports(a, SupportSet({0.11, 0.89})) == doctest::Approx(0.01));
    CHECK(match_supports(SupportSet({0.01, 0.5}), SupportSet({0.99, 0.49})) == doctest::Approx(0.02));
    CHECK_THROWS_AS(match_supports(a, SupportSet({0.1})), InvalidInput);
}

TEST_CASE("match_supports equals brute force and is a metric")
{
    std::mt19937_64 rng(9);
    for (int t = 0; t < 300; ++t) {
        const int S = 1 + t % 6;
        const auto p = oracle::random_points(rng, S, 0.0);
        const auto q = oracle::random_points(rng, S, 0.0);
        const auto r = oracle::random_points(rng, S, 0.0);
        const SupportSet P(p), Q(q), R(r);
        const double pq = match_supports(P, Q);
        CHECK(pq == doctest::Approx(oracle::match(p, q)).epsilon(1e-12));
        CHECK(pq == match_supports(Q, P));
        CHECK(pq <= match_supports(P, R) + match_supports(R, Q) + 1e-15);
        CHECK(match_supports(P, P) == 0.0);
    }
}
