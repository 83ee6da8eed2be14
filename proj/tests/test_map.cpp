#include <doctest.h>

#include <cmath>
#include <numbers>

#include <shadowkit/errors.hpp>
#include <shadowkit/intervals.hpp>
#include <shadowkit/map.hpp>
#include <shadowkit/observable.hpp>

#include "oracles.hpp"

using namespace shadowkit;

TEST_CASE("tent evaluation matches the closed form") {
    const auto t = tent(2.0);
    for (double x : {0.0, 0.1, 0.25, 0.5, 0.7, 1.0}) CHECK(eval(t, x) == doctest::Approx(2 * std::min(x, 1 - x)));
    const auto s = tent(std::sqrt(2.0));
    CHECK(eval(s, 0.5) == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK_THROWS_AS(eval(t, 1.5), DomainError);
    CHECK_THROWS_AS(eval(t, std::nan("")), DomainError);
    CHECK_THROWS_AS(tent(2.5), ParameterError);
}

TEST_CASE("MapSpec rejects broken node tables") {
    CHECK_THROWS_AS(MapSpec({0.0, 0.6, 0.5, 1.0}, {0, 1, 0, 1}, "x"), ParameterError);
    CHECK_THROWS_AS(MapSpec({0.0, 1.0}, {0.0, 1.5}, "x"), ParameterError);
    CHECK_THROWS_AS(MapSpec({0.1, 1.0}, {0.0, 1.0}, "x"), ParameterError);
}

TEST_CASE("exact map agrees with double evaluation on dyadics") {
    const auto t = tent(2.0);
    const ExactMap e(t);
    for (int i = 0; i <= 64; ++i) {
        const double x = i / 64.0;
        CHECK(e(Rational(x)).convert_to<double>() == eval(t, x));
    }
    CHECK(e(Rational(2, 3)) == Rational(2, 3));
}

TEST_CASE("bowen distance equals the direct loop") {
    const auto t = tent(1.8);
    for (double x : {0.1, 0.33, 0.71})
        for (double y : {0.12, 0.5, 0.9}) CHECK(bowen_dist(t, x, y, 12) == doctest::Approx(oracle::bowen(t, x, y, 12)));
}

TEST_CASE("example_exv structure") {
    const auto m = example_exv(2);
    CHECK(lipschitz_constant(m) == doctest::Approx(2.5));
    const auto cores = exv_cores(2);
    CHECK(cores.size() >= 2);
    // cores are invariant: rescaled tents map the core onto itself
    for (const auto& c : cores) {
        double lo = 1, hi = 0;
        for (int i = 0; i <= 1000; ++i) {
            const double y = eval(m, c.lo + (c.hi - c.lo) * i / 1000.0);
            lo = std::min(lo, y);
            hi = std::max(hi, y);
        }
        CHECK(lo >= c.lo - 1e-12);
        CHECK(hi <= c.hi + 1e-12);
    }
    const std::vector<double> bad{2.0, 1.2, 2.0};
    CHECK_THROWS_AS(example_exv(2, bad), ParameterError);
}

TEST_CASE("map JSON round trip and line-anchored errors") {
    const auto t = tent(1.5);
    const auto back = parse_map_json(map_to_json(t));
    CHECK(back.breakpoints() == t.breakpoints());
    CHECK(back.values() == t.values());
    const std::string bad = "{\n  \"label\": \"x\",\n  \"breakpoints\": [0, 0.7, 0.5, 1],\n  \"values\": [0, 1, 0, 1]\n}";
    try {
        parse_map_json(bad, "bad.json");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).rfind("bad.json:", 0) == 0);
    }
    CHECK_THROWS_AS(parse_map_json("{ nope", "x.json"), FormatError);
}

TEST_CASE("observables") {
    const auto c = Observable::cosine(2);
    CHECK(c(0.125) == doctest::Approx(std::cos(2 * std::numbers::pi * 2 * 0.125)));
    CHECK(c.lipschitz() == doctest::Approx(4 * std::numbers::pi));
    CHECK_THROWS(c.breakpoints());
    const auto x = Observable::coordinate();
    CHECK(x(0.3) == 0.3);
    CHECK(x.sup_abs() == 1.0);
    const auto k = Observable::constant(0.5).plus_scaled(x, 0.25);
    CHECK(k(0.4) == doctest::Approx(0.6));
    CHECK(k.lipschitz() == doctest::Approx(0.25));
    const auto pl = Observable::piecewise_linear({0, 0.5, 1}, {0, 1, 0});
    CHECK(pl(0.25) == doctest::Approx(0.5));
    CHECK(pl.lipschitz() == doctest::Approx(2.0));
}

TEST_CASE("interval images and branch measures") {
    const auto t = tent(2.0);
    const auto img = image(t, IntervalSet{{0.1, 0.2}, {0.6, 0.7}});
    REQUIRE(img.size() == 2);
    CHECK(img[0].lo == doctest::Approx(0.2));
    CHECK(img[0].hi == doctest::Approx(0.4));
    CHECK(img[1].lo == doctest::Approx(0.6));
    CHECK(img[1].hi == doctest::Approx(0.8));
    CHECK(total_length(merge({{0, 0.3}, {0.2, 0.5}, {0.7, 0.8}})) == doctest::Approx(0.6));

    // measure of {x : T^3 x in [0, 0.25]} is 0.25 since Lebesgue is invariant
    BranchSet b({0, 1});
    for (int i = 0; i < 3; ++i) b.step(t);
    b.restrict_to({0, 0.25});
    CHECK(b.measure() == doctest::Approx(0.25));
}
