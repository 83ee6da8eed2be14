#include <doctest.h>

#include <cmath>
#include <random>

#include <shadowkit/birkhoff.hpp>
#include <shadowkit/errors.hpp>
#include <shadowkit/periodic.hpp>

#include "oracles.hpp"

using namespace shadowkit;

TEST_CASE("birkhoff average equals the direct sum") {
    const auto t = tent(1.7);
    const auto phi = Observable::cosine(1);
    double x = 0.123, s = 0;
    // short horizon: two evaluators round differently and chaos amplifies it
    for (int i = 0; i < 30; ++i) {
        s += phi(x);
        x = oracle::apply(t, x);
    }
    CHECK(birkhoff_average(t, phi, 0.123, 30) == doctest::Approx(s / 30).epsilon(1e-6));
    const auto run = running_averages(t, phi, 0.123, 30);
    CHECK(run.back() == doctest::Approx(s / 30).epsilon(1e-6));
}

TEST_CASE("fixed points have exact averages") {
    const ExactMap e(tent(2.0));
    const auto x = Observable::coordinate();
    CHECK(birkhoff_average(e, x, Rational(2, 3), 1000) == doctest::Approx(2.0 / 3));
    CHECK(birkhoff_average(e, x, Rational(2, 5), 1000) == doctest::Approx(0.6));  // {2/5, 4/5}
}

TEST_CASE("irregularity report on a regular point shows no gap") {
    const ExactMap e(tent(2.0));
    const auto r = irregularity_report(e, Observable::coordinate(), Rational(2, 9), 3000);
    CHECK(r.gap < 0.01);
    CHECK(level_set_member(r, 14.0 / 27, 0.01));  // (2+4+8)/27
    CHECK_THROWS_AS(irregularity_report(tent(2.0), Observable::coordinate(), 0.1, 10), ParameterError);
}

TEST_CASE("bounded-Lipschitz distance") {
    const GridPartition g(1.0 / 256);
    const auto u = uniform_measure(g);
    CHECK(bl_distance(u, u) == doctest::Approx(0.0));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0, 1);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(50), b(50), c(50);
        for (auto* v : {&a, &b, &c})
            for (auto& x : *v) x = U(rng);
        const auto ma = empirical_measure(a, g), mb = empirical_measure(b, g), mc = empirical_measure(c, g);
        CHECK(bl_distance(ma, mc) <= bl_distance(ma, mb) + bl_distance(mb, mc) + 1e-12);
        CHECK(bl_distance(ma, mb) == doctest::Approx(bl_distance(mb, ma)));
    }
    CHECK_THROWS_AS(bl_distance(u, uniform_measure(GridPartition(1.0 / 128))), ParameterError);
}

TEST_CASE("empirical measure of a long typical orbit approaches Lebesgue") {
    const GridPartition g(1.0 / 64);
    const auto mu = empirical_measure(tent(1.9), 0.1234567, 200000, g);
    CHECK(integrate(mu, [](double x) { return x; }) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("periodic orbit counts of tent(2) follow the Moebius formula") {
    const auto orbits = periodic_orbits(tent(2.0), 10);
    std::vector<std::size_t> count(11, 0);
    for (const auto& o : orbits) ++count[o.period()];
    for (std::size_t p = 1; p <= 10; ++p) CHECK(count[p] == oracle::tent2_cycle_count(p));
    // exact points are periodic under exact iteration
    const ExactMap e(tent(2.0));
    for (const auto& o : orbits) {
        Rational y = o.points.front();
        for (std::size_t i = 0; i < o.period(); ++i) y = e(y);
        CHECK(y == o.points.front());
    }
}

TEST_CASE("known small cycles") {
    const auto orbits = periodic_orbits(tent(2.0), 3);
    auto has = [&](std::vector<Rational> pts) {
        for (const auto& o : orbits)
            if (o.points == pts) return true;
        return false;
    };
    CHECK(has({Rational(0)}));
    CHECK(has({Rational(2, 3)}));
    CHECK(has({Rational(2, 5), Rational(4, 5)}));
    CHECK(has({Rational(2, 9), Rational(4, 9), Rational(8, 9)}));
}
