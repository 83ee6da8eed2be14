#include <doctest.h>

#include <cmath>

#include <shadowkit/errors.hpp>
#include <shadowkit/level_sets.hpp>

#include "oracles.hpp"

using namespace shadowkit;

TEST_CASE("exact level measure against affine-piece enumeration") {
    const auto t = tent(2.0);
    const auto x = Observable::coordinate();
    for (double c : {0.4, 0.6, 0.75}) {
        const auto series = dn_measure_exact_series(t, x, c, 10);
        for (std::size_t n = 1; n <= 10; ++n) {
            const double ref = oracle::coordinate_level_measure(t, Rational(c), n).convert_to<double>();
            CHECK(series[n - 1] == doctest::Approx(ref).epsilon(1e-12));
        }
    }
    CHECK(dn_measure_exact(t, x, 0.6, 2) == doctest::Approx(0.4).epsilon(1e-12));
    const auto s = tent(1.8);
    CHECK(dn_measure_exact(s, x, 0.5, 7) ==
          doctest::Approx(oracle::coordinate_level_measure(s, Rational(0.5), 7).convert_to<double>()).epsilon(1e-12));
}

TEST_CASE("Monte Carlo agrees with the exact measure") {
    const auto t = tent(2.0);
    const auto x = Observable::coordinate();
    const double exact = dn_measure_exact(t, x, 0.6, 8);
    const auto mc = dn_measure_mc(t, x, 0.6, 8, 100000, 3);
    CHECK(std::abs(mc.estimate - exact) < 5 * mc.stderr_ + 1e-3);
}

TEST_CASE("rate bound is -inf above every candidate mean") {
    const auto b = rate_lower_bound(tent(2.0), Observable::coordinate(), std::log(2.0), 0.99, 8);
    CHECK(std::isinf(b.bound));
    CHECK(b.bound < 0);
    CHECK_THROWS_AS(rate_lower_bound(tent(2.0), Observable::coordinate(), std::log(2.0), 0.5, 20), ParameterError);
}

TEST_CASE("rate inequality on tent(2) below and above the mean") {
    const auto t = tent(2.0);
    const auto x = Observable::coordinate();
    const auto v = check_theorem_vminus(t, x, std::log(2.0), 0.6, 2, 12, 0.05, 8);
    CHECK(v.holds);
    CHECK(v.bound <= 0.0);
    const auto high = check_theorem_vminus(t, x, std::log(2.0), 0.99, 2, 8, 0.05, 8);
    CHECK(high.vacuous);
    CHECK_FALSE(high.holds);
}
