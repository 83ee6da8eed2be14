#pragma once

#include <cstddef>
#include <vector>

#include "shadowkit/map.hpp"
#include "shadowkit/observable.hpp"

namespace shadowkit {

/// One periodic cycle, listed along the orbit from its smallest point.
struct PeriodicOrbit {
    std::vector<Rational> points;
    std::vector<double> states;

    std::size_t period() const { return points.size(); }
    double average(const Observable& phi) const;
};

/// Every cycle of minimal period <= max_period found by solving T^p y = y on
/// the affine branches of T^p in exact arithmetic. Branches on which T^p is
/// the identity (a continuum of periodic points) are skipped. Ordered by
/// period, then by smallest point.
std::vector<PeriodicOrbit> periodic_orbits(const MapSpec& map, std::size_t max_period,
                                           std::size_t branch_cap = std::size_t(1) << 22);

}  // namespace shadowkit
