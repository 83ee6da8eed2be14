#include <doctest.h>

#include <cmath>

#include <shadowkit/errors.hpp>
#include <shadowkit/shadowing.hpp>

#include "oracles.hpp"

using namespace shadowkit;

TEST_CASE("a true orbit is its own shadow") {
    const auto t = tent(1.9);
    std::vector<double> xs{0.3};
    for (int i = 0; i < 60; ++i) xs.push_back(oracle::apply(t, xs.back()));
    CHECK(max_gap(t, xs) < 1e-12);
    const auto tr = trace(t, xs, 1e-3);
    REQUIRE(tr.exact_shadow_point);
    CHECK(exact_trace_error(ExactMap(t), *tr.exact_shadow_point, xs) <= 1e-3);
}

TEST_CASE("perturbed pseudo-orbits are delta-pseudo-orbits and get traced") {
    const auto t = tent(2.0);
    const ExactMap e(t);
    for (std::uint64_t s = 1; s <= 10; ++s) {
        const auto po = perturbed_orbit(t, 0.1 * double(s) / 1.1, 300, 1e-4, s);
        CHECK(is_pseudo_orbit(t, po.states, 1e-4));
        // gaps measured by the oracle evaluator
        for (std::size_t i = 0; i + 1 < po.states.size(); ++i)
            CHECK(std::abs(oracle::apply(t, po.states[i]) - po.states[i + 1]) < 1e-4);
        const auto tr = trace(t, po, 1e-3);
        CHECK(exact_trace_error(e, *tr.exact_shadow_point, po.states) <= 1e-3 + 1e-12);
    }
}

TEST_CASE("identity map does not shadow a drifting chain") {
    const auto id = identity_map();
    std::vector<double> xs;
    for (int i = 0; i < 50; ++i) xs.push_back(0.2 + 0.009 * i);
    try {
        trace(id, xs, 1e-3);
        FAIL("expected NotShadowed");
    } catch (const NotShadowed& e) {
        CHECK(e.index() <= 2);
    }
    CHECK_FALSE(traceable(id, xs, 1e-3));
}

TEST_CASE("shadowing modulus of the doubling tent is of order eps") {
    const double d = shadowing_modulus(tent(2.0), 0.01, 10, 200, 3);
    CHECK(d > 0.005);
    CHECK(d < 0.05);
    // no expansion: random-walk drift eats the budget
    CHECK(shadowing_modulus(identity_map(), 0.01, 5, 200, 3) < d / 3);
}

TEST_CASE("pseudo-orbit CSV round trip") {
    const auto t = tent(2.0);
    const auto po = perturbed_orbit(t, 0.3, 20, 1e-3, 9);
    const auto back = pseudo_orbit_from_csv(to_csv(po));
    CHECK(back.states == po.states);
    CHECK(back.delta == po.delta);
    CHECK_THROWS_AS(pseudo_orbit_from_csv("# delta=0.1,provenance=x\n0.1\nabc\n", "p.csv"), FormatError);
}

TEST_CASE("full shift: pseudo-orbits are traced by the leading-symbol point") {
    const ShiftSystem sys(2, 0.5);
    const auto po = shift_pseudo_orbit(sys, 40, 24, 6, 5);
    CHECK(is_shift_pseudo_orbit(sys, po, std::pow(0.5, 6) + 1e-15));
    const auto y = trace_shift(po);
    CHECK(shift_trace_error(sys, y, po) <= std::pow(0.5, 6) + 1e-15);
    CHECK(sys.entropy() == doctest::Approx(std::log(2.0)));
}

TEST_CASE("derive_seed separates streams") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(5, 7) == derive_seed(5, 7));
}
