#include <doctest.h>

#include <algorithm>

#include <shadowkit/chain.hpp>
#include <shadowkit/errors.hpp>

using namespace shadowkit;

TEST_CASE("grid partition indexing") {
    const GridPartition g(0.25);
    CHECK(g.cell_count == 4);
    CHECK(g.cell_of(0.0) == 0);
    CHECK(g.cell_of(0.3) == 1);
    CHECK(g.cell_of(1.0) == 3);
    CHECK(g.midpoint(2) == doctest::Approx(0.625));
}

TEST_CASE("transition graph on a coarse grid matches a hand computation") {
    // tent(2), h = 1/8, delta = 0.15: [0,1/8] -> [0,1/4] -> inflated [0,0.4];
    // [3/8,1/2] -> [3/4,1] -> inflated [0.6,1]
    const auto g = build_transition_graph(tent(2.0), GridPartition(0.125), 0.15);
    auto sorted = [](std::vector<std::size_t> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    CHECK(sorted(g.adjacency[0]) == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(sorted(g.adjacency[3]) == std::vector<std::size_t>{4, 5, 6, 7});
    CHECK_THROWS_AS(build_transition_graph(tent(2.0), GridPartition(0.25), 0.1), ParameterError);
}

TEST_CASE("tent(2) is chain transitive") {
    const double h = 1.0 / 1024;
    const auto g = build_transition_graph(tent(2.0), GridPartition(h), 2 * h);
    const auto cls = chain_classes(g);
    CHECK(cls.classes.size() == 1);
    CHECK(chain_related(g, 0.1, 0.9));
    CHECK(chain_related(g, 0.9, 0.1));
}

TEST_CASE("a contraction only has classes next to its fixed point") {
    const double h = 1.0 / 512;
    const auto g = build_transition_graph(linear_map(0.5), GridPartition(h), 2 * h);
    const auto cls = chain_classes(g);
    REQUIRE(!cls.classes.empty());
    CHECK(hull(g.grid, cls.classes[0]).lo == 0.0);
    // outer approximation: cells within a few delta of 0 may form extra classes
    for (const auto& c : cls.classes) CHECK(hull(g.grid, c).hi <= 8 * h);
    // 0.8 chains down to 0 but never back, so the two are not related
    CHECK_FALSE(chain_related(g, 0.8, 0.0));
    CHECK(chain_related(g, 0.0, 0.0));
}

TEST_CASE("example_exv splits into several classes covering the cores") {
    const double h = 1.0 / 4096;
    const auto m = example_exv(2);
    const auto g = build_transition_graph(m, GridPartition(h), 2 * h);
    const auto cls = chain_classes(g);
    CHECK(cls.classes.size() >= 2);
    for (const auto& core : exv_cores(2)) {
        bool covered = false;
        for (const auto& c : cls.classes) {
            const auto hl = hull(g.grid, c);
            if (hl.lo <= core.lo + 2 * h && hl.hi >= core.hi - 2 * h) covered = true;
        }
        CHECK(covered);
    }
}

TEST_CASE("omega limit of a fixed point lands in its class") {
    const double h = 1.0 / 1024;
    const auto g = build_transition_graph(tent(2.0), GridPartition(h), 2 * h);
    const auto cells = omega_limit_cells(ExactMap(tent(2.0)), Rational(2, 3), 10, 50, g.grid);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0] == g.grid.cell_of(2.0 / 3));
    const auto m = containing_class(chain_classes(g), cells);
    CHECK(m.class_index == 0);
}
