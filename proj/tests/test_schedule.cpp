#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "procreate/schedule.hpp"

using namespace procreate;

TEST_CASE("linear schedule single-factor product") {
    auto s = make_linear_schedule(1000, 1e-4, 0.02);
    CHECK(s.alpha_bar[0] == 1.0);
    CHECK(s.alpha_bar[1] == doctest::Approx(0.9999).epsilon(1e-12));
}

TEST_CASE("one-step schedule") {
    auto s = make_linear_schedule(1, 0.5, 0.5);
    REQUIRE(s.alpha_bar.size() == 2);
    CHECK(s.alpha_bar[0] == 1.0);
    CHECK(s.alpha_bar[1] == doctest::Approx(0.5));
}

TEST_CASE("matches independent cumulative-product oracle") {
    const int T = 1000;
    const double b0 = 1e-4, b1 = 0.02;
    auto s = make_linear_schedule(T, b0, b1);
    // brute-force product over all betas, higher precision accumulator
    long double prod = 1.0L;
    for (int t = 1; t <= T; ++t) {
        long double beta = b0 + (long double)(t - 1) / (T - 1) * (b1 - b0);
        prod *= 1.0L - beta;
        CHECK(s.alpha_bar[(size_t)t] == doctest::Approx((double)prod).epsilon(1e-12));
    }
}

TEST_CASE("invariants over random schedules") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> unif(1e-5, 0.4);
    for (int trial = 0; trial < 50; ++trial) {
        int T = 1 + int(gen() % 500);
        double a = unif(gen), b = unif(gen);
        if (a > b) std::swap(a, b);
        auto s = make_linear_schedule(T, a, b);
        CHECK(s.alpha_bar[0] == 1.0);
        for (int t = 1; t <= T; ++t) {
            CHECK(s.alpha_bar[(size_t)t] < s.alpha_bar[(size_t)t - 1]);
            CHECK(s.alpha_bar[(size_t)t] > 0.0);
            CHECK(s.alpha_bar[(size_t)t] <= 1.0);
        }
    }
}

TEST_CASE("parameter errors") {
    CHECK_THROWS_AS(make_linear_schedule(0, 1e-4, 0.02), ConfigError);
    CHECK_THROWS_AS(make_linear_schedule(10, 0.0, 0.02), ConfigError);
    CHECK_THROWS_AS(make_linear_schedule(10, 0.5, 0.2), ConfigError);
    CHECK_THROWS_AS(make_linear_schedule(10, 0.5, 1.0), ConfigError);
}

TEST_CASE("timestep grid shape") {
    auto g = timestep_grid(1000, 50);
    REQUIRE(g.size() == 51);
    CHECK(g.front() == 1000);
    CHECK(g.back() == 0);
    for (size_t i = 1; i < g.size(); ++i) CHECK(g[i] < g[i - 1]);

    auto full = timestep_grid(10, 10);
    REQUIRE(full.size() == 11);
    for (int i = 0; i <= 10; ++i) CHECK(full[(size_t)i] == 10 - i);

    CHECK_THROWS_AS(timestep_grid(10, 11), ConfigError);
    CHECK_THROWS_AS(timestep_grid(10, 0), ConfigError);
}
