#include "shadowkit/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shadowkit/errors.hpp"

namespace shadowkit {

IntervalSet merge(IntervalSet set) {
    std::sort(set.begin(), set.end(), [](const Interval& l, const Interval& r) { return l.lo < r.lo; });
    IntervalSet out;
    for (const auto& iv : set) {
        if (iv.hi < iv.lo) continue;
        if (!out.empty() && iv.lo <= out.back().hi)
            out.back().hi = std::max(out.back().hi, iv.hi);
        else
            out.push_back(iv);
    }
    return out;
}

IntervalSet intersect(const IntervalSet& set, Interval window) {
    IntervalSet out;
    for (const auto& iv : set) {
        const double lo = std::max(iv.lo, window.lo);
        const double hi = std::min(iv.hi, window.hi);
        if (lo <= hi) out.push_back({lo, hi});
    }
    return out;
}

double total_length(const IntervalSet& set) {
    double s = 0.0;
    for (const auto& iv : set) s += iv.width();
    return s;
}

double distance_to(const IntervalSet& set, double x) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& iv : set) {
        if (iv.contains(x)) return 0.0;
        d = std::min(d, x < iv.lo ? iv.lo - x : x - iv.hi);
    }
    return d;
}

const Interval* widest(const IntervalSet& set) {
    const Interval* best = nullptr;
    for (const auto& iv : set)
        if (!best || iv.width() > best->width()) best = &iv;
    return best;
}

Interval image(const MapSpec& map, Interval in) {
    double lo = eval(map, in.lo);
    double hi = lo;
    const double v = eval(map, in.hi);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    const auto& bp = map.breakpoints();
    const auto& val = map.values();
    auto it = std::upper_bound(bp.begin(), bp.end(), in.lo);
    for (; it != bp.end() && *it < in.hi; ++it) {
        const double y = val[std::size_t(it - bp.begin())];
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    return {lo, hi};
}

IntervalSet image(const MapSpec& map, const IntervalSet& in) {
    IntervalSet out;
    out.reserve(in.size());
    for (const auto& iv : in) out.push_back(image(map, iv));
    return merge(std::move(out));
}

BranchSet::BranchSet(Interval start, std::size_t cap) : cap_(cap) {
    if (start.lo <= start.hi) branches_.push_back({start.lo, start.hi, 1.0, 0.0, 0.0, 0.0});
}

void BranchSet::check_cap() const {
    if (branches_.size() > cap_)
        throw ResolutionError("branch refinement exceeded " + std::to_string(cap_) + " pieces");
}

namespace {

// Split points in y where the affine image a*y+b crosses the given nodes,
// returned in increasing y order together with the piece boundaries.
std::vector<double> cut_points(const Branch& br, const std::vector<double>& nodes) {
    std::vector<double> cuts{br.lo};
    if (br.a != 0.0) {
        const double ilo = br.image_lo();
        const double ihi = br.image_hi();
        auto first = std::upper_bound(nodes.begin(), nodes.end(), ilo);
        auto last = std::lower_bound(nodes.begin(), nodes.end(), ihi);
        std::vector<double> ys;
        for (auto it = first; it < last; ++it) ys.push_back((*it - br.b) / br.a);
        if (br.a < 0.0) std::reverse(ys.begin(), ys.end());
        for (double y : ys)
            if (y > cuts.back() && y < br.hi) cuts.push_back(y);
    }
    cuts.push_back(br.hi);
    return cuts;
}

}  // namespace

void BranchSet::step(const MapSpec& map) {
    std::vector<Branch> next;
    next.reserve(branches_.size() * 2);
    const auto& bp = map.breakpoints();
    const auto& val = map.values();
    for (const auto& br : branches_) {
        const auto cuts = cut_points(br, bp);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            Branch piece = br;
            piece.lo = cuts[c];
            piece.hi = cuts[c + 1];
            const double mid = std::clamp(br.a * (0.5 * (piece.lo + piece.hi)) + br.b, 0.0, 1.0);
            const std::size_t k = map.segment_of(mid);
            const double s = map.slope(k);
            piece.a = s * br.a;
            piece.b = s * (br.b - bp[k]) + val[k];
            next.push_back(piece);
        }
    }
    branches_ = std::move(next);
    check_cap();
}

void BranchSet::restrict_to(Interval window) {
    std::vector<Branch> next;
    next.reserve(branches_.size());
    for (auto br : branches_) {
        if (br.a == 0.0) {
            if (window.contains(br.b)) next.push_back(br);
            continue;
        }
        double y0 = (window.lo - br.b) / br.a;
        double y1 = (window.hi - br.b) / br.a;
        if (y0 > y1) std::swap(y0, y1);
        br.lo = std::max(br.lo, y0);
        br.hi = std::min(br.hi, y1);
        if (br.lo <= br.hi) next.push_back(br);
    }
    branches_ = std::move(next);
}

void BranchSet::accumulate(const Observable& phi) {
    const auto& nodes = phi.breakpoints();
    const auto& vals = phi.values();
    std::vector<Branch> next;
    next.reserve(branches_.size());
    for (const auto& br : branches_) {
        const auto cuts = cut_points(br, nodes);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            Branch piece = br;
            piece.lo = cuts[c];
            piece.hi = cuts[c + 1];
            const double mid = std::clamp(br.a * (0.5 * (piece.lo + piece.hi)) + br.b, 0.0, 1.0);
            auto it = std::upper_bound(nodes.begin(), nodes.end(), mid);
            std::size_t k = it == nodes.begin() ? 0 : std::size_t(it - nodes.begin()) - 1;
            k = std::min(k, nodes.size() - 2);
            const double s = (vals[k + 1] - vals[k]) / (nodes[k + 1] - nodes[k]);
            // phi(T^i y) = s (a y + b - node_k) + val_k
            piece.sa += s * br.a;
            piece.sb += s * (br.b - nodes[k]) + vals[k];
            next.push_back(piece);
        }
    }
    branches_ = std::move(next);
    check_cap();
}

double BranchSet::measure() const {
    double m = 0.0;
    for (const auto& br : branches_) m += br.hi - br.lo;
    return m;
}

double BranchSet::measure_sum_above(double threshold) const {
    double m = 0.0;
    for (const auto& br : branches_) {
        if (br.sa == 0.0) {
            if (br.sb > threshold) m += br.hi - br.lo;
            continue;
        }
        const double y = (threshold - br.sb) / br.sa;
        if (br.sa > 0.0)
            m += br.hi - std::clamp(y, br.lo, br.hi);
        else
            m += std::clamp(y, br.lo, br.hi) - br.lo;
    }
    return m;
}

}  // namespace shadowkit
