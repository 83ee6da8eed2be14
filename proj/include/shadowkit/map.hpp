#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace shadowkit {

/// Exact rationals; every double converts to one without rounding.
using Rational = boost::multiprecision::mpq_rational;

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Continuous piecewise-linear self-map of [0,1] given by its graph nodes.
///
/// Breakpoints are strictly increasing from 0 to 1 and every value lies in
/// [0,1]. Evaluation is linear interpolation between consecutive nodes, so the
/// map is continuous by construction.
class MapSpec {
public:
    MapSpec() = default;
    /// Validates and throws ParameterError on any violated invariant.
    MapSpec(std::vector<double> breakpoints, std::vector<double> values, std::string label);

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }
    const std::string& label() const { return label_; }

    std::size_t segment_count() const { return slopes_.size(); }
    /// Index k of the segment [bp[k], bp[k+1]] holding x (the left one at shared nodes).
    std::size_t segment_of(double x) const;
    double slope(std::size_t k) const { return slopes_[k]; }
    /// Value of the k-th segment's affine formula at x, without clamping to the segment.
    double eval_on_segment(std::size_t k, double x) const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> values_;
    std::vector<double> slopes_;
    std::string label_;
};

/// T(x). Throws DomainError when x is outside [0,1] or not finite.
double eval(const MapSpec& map, double x);

/// Same map with rational coefficients; evaluation is exact.
class ExactMap {
public:
    explicit ExactMap(const MapSpec& map);

    Rational operator()(const Rational& x) const;
    std::size_t segment_of(const Rational& x) const;
    const Rational& breakpoint(std::size_t k) const { return breakpoints_[k]; }
    const Rational& value(std::size_t k) const { return values_[k]; }
    const Rational& slope(std::size_t k) const { return slopes_[k]; }
    std::size_t segment_count() const { return slopes_.size(); }
    const MapSpec& spec() const { return spec_; }

private:
    MapSpec spec_;
    std::vector<Rational> breakpoints_;
    std::vector<Rational> values_;
    std::vector<Rational> slopes_;
};

struct Orbit {
    std::vector<double> states;
    std::string map_label;
};

/// First n points of the trajectory x0, T x0, ..., T^{n-1} x0.
Orbit orbit(const MapSpec& map, double x0, std::size_t n);

/// max_{j<n} |T^j x - T^j y|.
double bowen_dist(const MapSpec& map, double x, double y, std::size_t n);

/// Largest absolute segment slope.
double lipschitz_constant(const MapSpec& map);

// Builders.

/// x -> slope * min(x, 1 - x), slope in (0, 2].
MapSpec tent(double slope);
MapSpec identity_map();
/// x -> factor * x, factor in [0, 1].
MapSpec linear_map(double factor);

/// Lipschitz constant asserted for the infinite construction in the literature;
/// the truncations built here have max slope 2.5 (see lipschitz_constant).
inline constexpr double kExvClaimedLipschitz = 5.0;

/// Truncated nested-tent map: tent blocks on [b_n, a_n] (a_n = 2^-n,
/// b_n = 5 a_{n+1} / 4) with slopes[n] for n <= depth, affine connectors on
/// [a_{n+1}, b_n] with f(a_{n+1}) = b_{n+1}, f(b_n) = b_n, restricted to the
/// forward-invariant interval [b_depth, 1] and rescaled affinely onto [0,1].
/// slopes must have depth + 1 entries, slopes[0] == 2, all in (sqrt 2, 2].
MapSpec example_exv(std::size_t depth, std::span<const double> slopes);
/// example_exv with every slope equal to 2.
MapSpec example_exv(std::size_t depth);

/// Rescaled tent cores [b_n, a_n] of example_exv(depth), ordered n = 0..depth.
std::vector<Interval> exv_cores(std::size_t depth);

/// Parse the MapSpec JSON format {"label", "breakpoints", "values"}.
/// Errors are FormatError with a "source:line:" prefix.
MapSpec parse_map_json(const std::string& text, const std::string& source = "<map>");
MapSpec load_map_file(const std::string& path);
std::string map_to_json(const MapSpec& map);

/// Full shift on k symbols over finite words, d(u,v) = base^(first index where
/// they differ), 0 when they agree on the compared horizon.
struct ShiftSystem {
    using Word = std::vector<int>;

    int alphabet_size = 2;
    double metric_base = 0.5;

    ShiftSystem(int alphabet_size = 2, double metric_base = 0.5);

    double distance(const Word& u, const Word& v) const;
    static Word shift(const Word& u);
    /// log k, the exact topological entropy.
    double entropy() const;
};

}  // namespace shadowkit
