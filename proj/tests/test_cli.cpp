#include <doctest.h>

#include <json.hpp>

#include <shadowkit/cli.hpp>
#include <shadowkit/parallel.hpp>

using namespace shadowkit;
using nlohmann::json;

namespace {

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
    for (const auto& s : v)
        if (s.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("default configs validate for every subcommand") {
    for (const auto& sub : cli::subcommands()) CHECK(cli::validate("", sub).empty());
    CHECK(cli::validate(R"({"subcommand": "entropy"})", "validate").empty());
}

TEST_CASE("violations name the field") {
    const auto v1 = cli::validate(R"({"classes": {"h": 0.01, "delta": 0.005}})", "classes");
    CHECK(mentions(v1, "classes.delta"));
    CHECK(mentions(v1, "build_transition_graph"));
    const auto v2 = cli::validate(R"({"map": {"builder": "exv", "depth": 2, "slopes": [2, 1.3, 2]}})", "classes");
    CHECK(mentions(v2, "map:"));
    const auto v3 = cli::validate(R"({"irregular": {"xi": 0.6, "n_check": 9}})", "irregular");
    CHECK(mentions(v3, "irregular.xi"));
    CHECK(mentions(v3, "irregular.n_check"));
    CHECK(mentions(cli::validate(R"({"trace": {"eps": "big"}})", "trace"), "trace.eps"));
    CHECK(mentions(cli::validate("{ broken", "trace"), "config:"));
    CHECK(mentions(cli::validate(R"({"subcommand": "rate"})", "trace"), "subcommand"));
}

TEST_CASE("resolved config carries defaults and the seed override") {
    const auto r = cli::resolve(R"({"seed": 4})", "entropy", 9, true);
    const auto j = json::parse(r.config);
    CHECK(j.at("seed") == 9);
    CHECK(j.at("entropy").at("pool_log2") == 14);
    CHECK(j.at("map").at("label").get<std::string>().size() > 0);
}

TEST_CASE("rate above every candidate mean reports a negative verdict") {
    const auto r = cli::resolve(R"({"rate": {"c": 0.95, "n_lo": 2, "n_hi": 6}})", "rate");
    REQUIRE(r.violations.empty());
    const auto out = cli::run("rate", r.config);
    CHECK(out.exit_code == 2);
    const auto rep = json::parse(out.report_json);
    CHECK(rep.at("result").at("bound") == "-inf");
}

TEST_CASE("reports do not depend on the thread count") {
    const auto r = cli::resolve(R"({"trace": {"trials": 8, "horizon": 200}})", "trace");
    set_thread_count(1);
    const auto a = cli::run("trace", r.config);
    set_thread_count(4);
    const auto b = cli::run("trace", r.config);
    CHECK(a.report_json == b.report_json);
    CHECK(a.series_csv == b.series_csv);
}
