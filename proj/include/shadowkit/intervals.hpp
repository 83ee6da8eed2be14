#pragma once

#include <cstddef>
#include <vector>

#include "shadowkit/map.hpp"
#include "shadowkit/observable.hpp"

namespace shadowkit {

/// Sorted, pairwise disjoint closed intervals.
using IntervalSet = std::vector<Interval>;

/// Sort and fuse overlapping or touching intervals.
IntervalSet merge(IntervalSet set);
IntervalSet intersect(const IntervalSet& set, Interval window);
double total_length(const IntervalSet& set);
/// Distance from x to the set (0 inside); +inf for an empty set.
double distance_to(const IntervalSet& set, double x);
const Interval* widest(const IntervalSet& set);

/// Exact image of a subinterval of [0,1] under a continuous PL map.
Interval image(const MapSpec& map, Interval in);
IntervalSet image(const MapSpec& map, const IntervalSet& in);

/// Piece of [0,1] on which T^i is affine: T^i y = a y + b for y in [lo, hi].
/// sa, sb carry an affine Birkhoff sum when an observable is attached.
struct Branch {
    double lo = 0.0;
    double hi = 0.0;
    double a = 1.0;
    double b = 0.0;
    double sa = 0.0;
    double sb = 0.0;

    double image_lo() const { return a >= 0.0 ? a * lo + b : a * hi + b; }
    double image_hi() const { return a >= 0.0 ? a * hi + b : a * lo + b; }
};

/// Affine refinement of a set of initial conditions along the iterates of a PL map.
class BranchSet {
public:
    BranchSet(Interval start, std::size_t cap = std::size_t(1) << 22);

    /// Replace T^i by T^{i+1}, splitting where T^i crosses a breakpoint of the map.
    void step(const MapSpec& map);
    /// Keep only points whose current iterate lies in the window.
    void restrict_to(Interval window);
    /// Add phi(T^i y) to the running sum, splitting at preimages of phi's nodes.
    void accumulate(const Observable& phi);

    const std::vector<Branch>& branches() const { return branches_; }
    std::size_t size() const { return branches_.size(); }
    double measure() const;
    /// Lebesgue measure of {y : sum(y) > threshold}.
    double measure_sum_above(double threshold) const;

private:
    void check_cap() const;

    std::vector<Branch> branches_;
    std::size_t cap_;
};

}  // namespace shadowkit
