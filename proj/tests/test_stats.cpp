#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ballistic/rng.hpp"
#include "ballistic/stats.hpp"
#include "support/oracles.hpp"

using namespace ballistic;

TEST_CASE("linear_fit recovers an exact line") {
    const std::vector<double> x{0, 1, 2, 3, 4};
    const std::vector<double> y{1, 3, 5, 7, 9};
    const LinearFit f = linear_fit(x, y);
    CHECK(f.slope == Catch::Approx(2.0).margin(1e-14));
    CHECK(f.intercept == Catch::Approx(1.0).margin(1e-14));
    CHECK(f.r2 == Catch::Approx(1.0).margin(1e-14));
    CHECK(f.slope_se == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("linear_fit rejects degenerate input") {
    CHECK_THROWS_AS(linear_fit({1.0}, {2.0}), InsufficientData);
    CHECK_THROWS_AS(linear_fit({1, 2}, {1, 2, 3}), InsufficientData);
    CHECK_THROWS_AS(linear_fit({3, 3, 3}, {1, 2, 3}), InsufficientData);
}

TEST_CASE("median handles odd, even, and empty input") {
    CHECK(median({5, 1, 3}) == 3.0);
    CHECK(median({4, 1, 3, 2}) == 2.5);
    CHECK(median({7}) == 7.0);
    CHECK_THROWS_AS(median({}), EmptyInput);
}

TEST_CASE("two-sample KS distance on a hand-computed case") {
    // F_a steps by 1/3 at {1,2,3}; F_b by 1/2 at {1.5,2.5}; sup gap is 1/3
    const KsResult r = ks_two_sample({1, 2, 3}, {1.5, 2.5});
    CHECK(r.d == Catch::Approx(1.0 / 3.0).margin(1e-14));
}

TEST_CASE("two-sample KS accepts identical samples") {
    Xoshiro256 rng(3);
    std::vector<double> a(5000);
    for (double& v : a) v = rng.normal();
    const KsResult r = ks_two_sample(a, a);
    CHECK(r.d == 0.0);
    CHECK(r.p == 1.0);
}

TEST_CASE("one-sample KS against uniform on a hand-computed case") {
    CHECK(ks_vs_uniform01({0.5}).d == Catch::Approx(0.5).margin(1e-14));
    CHECK(ks_vs_uniform01({0.25, 0.75}).d == Catch::Approx(0.25).margin(1e-14));
    CHECK_THROWS_AS(ks_vs_uniform01({}), EmptyInput);
}

TEST_CASE("kolmogorov tail probability hits the classical 5% point") {
    CHECK(ks_tail_prob(1.358) == Catch::Approx(0.05).margin(0.002));
    CHECK(ks_tail_prob(0.1) == 1.0);
    CHECK(ks_tail_prob(3.0) < 1e-6);
    CHECK(ks_tail_prob(0.8) > ks_tail_prob(1.2));
}

TEST_CASE("tail fit recovers the exponent of exact Pareto samples") {
    Xoshiro256 rng(11);
    const std::size_t n = 100000;
    std::vector<double> t(n);
    std::vector<bool> cens(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = oracle::pareto_time(1.0, 1.0, rng);
        cens[i] = v > 1e6;
        t[i] = cens[i] ? 1e6 : v;
    }
    const TailFit f = tail_fit_survival(t, cens);
    CHECK(f.exponent_hat == Catch::Approx(1.0).margin(0.05));
    CHECK(f.t_lo == Catch::Approx(100.0));
    CHECK(f.points >= 2);
    CHECK(f.n_samples == n);
}

TEST_CASE("tail fit window stops where survivors run out") {
    // mu = 1 with 10^4 samples leaves ~30 survivors near t = 333
    Xoshiro256 rng(12);
    const std::size_t n = 10000;
    std::vector<double> t(n);
    std::vector<bool> cens(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = oracle::pareto_time(1.0, 1.0, rng);
        cens[i] = v > 1e6;
        t[i] = cens[i] ? 1e6 : v;
    }
    const TailFit f = tail_fit_survival(t, cens);
    CHECK(f.t_lo == Catch::Approx(100.0));
    CHECK(f.t_hi < 600.0);
    CHECK(f.exponent_hat == Catch::Approx(1.0).margin(0.12));
}

TEST_CASE("tail fit rejects unusable input") {
    const std::size_t n = 10000;
    SECTION("fewer samples than required") {
        CHECK_THROWS_AS(tail_fit_survival(std::vector<double>(100, 5.0),
                                          std::vector<bool>(100, false)),
                        InsufficientData);
    }
    SECTION("size mismatch") {
        CHECK_THROWS_AS(tail_fit_survival(std::vector<double>(n, 5.0),
                                          std::vector<bool>(n - 1, false)),
                        ConfigurationError);
    }
    SECTION("every sample censored") {
        CHECK_THROWS_AS(tail_fit_survival(std::vector<double>(n, 1e6),
                                          std::vector<bool>(n, true)),
                        WindowEmpty);
    }
    SECTION("horizon below the first grid point") {
        // all deaths below t_min leave no grid survivors to regress on
        std::vector<double> t(n, 5.0);
        std::vector<bool> cens(n, false);
        t[0] = 50.0;
        cens[0] = true; // horizon 50 < t_min 100
        CHECK_THROWS_AS(tail_fit_survival(t, cens), WindowEmpty);
    }
}

TEST_CASE("censored samples count as survivors below their horizon") {
    // half the mass dies at t=120, half censors at 1e5: survival is flat at
    // 0.5 beyond 120, so the fitted exponent is near zero
    const std::size_t n = 20000;
    std::vector<double> t(n);
    std::vector<bool> cens(n);
    for (std::size_t i = 0; i < n; ++i) {
        cens[i] = i % 2 == 0;
        t[i] = cens[i] ? 1e5 : 120.0;
    }
    const TailFit f = tail_fit_survival(t, cens);
    CHECK(std::abs(f.exponent_hat) < 0.08);
}
