#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shadowkit/intervals.hpp"
#include "shadowkit/map.hpp"

namespace shadowkit {

struct PseudoOrbit {
    std::vector<double> states;
    double delta = 0.0;
    std::string provenance;
};

/// Largest one-step gap |T s_i - s_{i+1}|.
double max_gap(const MapSpec& map, std::span<const double> states);
bool is_pseudo_orbit(const MapSpec& map, std::span<const double> states, double delta);

/// Checks the gap invariant against map; ParameterError when it fails.
PseudoOrbit make_pseudo_orbit(const MapSpec& map, std::vector<double> states, double delta,
                              std::string provenance);

/// s_0 = x0, s_{i+1} = clamp(T s_i + u_i) with u_i uniform in (-delta/2, delta/2).
PseudoOrbit perturbed_orbit(const MapSpec& map, double x0, std::size_t n, double delta,
                            std::uint64_t seed);

struct TraceResult {
    std::optional<double> shadow_point;
    /// Exact tracing point; shadow_point is its nearest double. For expanding
    /// maps only the exact point's orbit is guaranteed to stay eps-close.
    std::optional<Rational> exact_shadow_point;
    double achieved_error = 0.0;
    double surviving_interval_width = 0.0;
};

/// Sets W_i = {T^i y : |T^j y - s_j| <= eps for j <= i}, refined forward.
class ForwardTracer {
public:
    ForwardTracer(const MapSpec& map, double eps, std::size_t cap = 4096);

    /// Consumes the next pseudo-orbit state; throws NotShadowed on an empty set.
    void feed(double state);
    const IntervalSet& current() const { return set_; }
    std::size_t consumed() const { return consumed_; }
    void reset(IntervalSet set, std::size_t consumed);

private:
    const MapSpec* map_;
    double eps_;
    std::size_t cap_;
    IntervalSet set_;
    std::size_t consumed_ = 0;
};

/// Finds y whose orbit eps-traces states; throws NotShadowed(i) when the
/// surviving set first becomes empty at index i.
TraceResult trace(const MapSpec& map, std::span<const double> states, double eps);
TraceResult trace(const MapSpec& map, const PseudoOrbit& po, double eps);
/// Forward pass only.
bool traceable(const MapSpec& map, std::span<const double> states, double eps);

/// max_i |T^i y - s_i| for the exact orbit of y.
double exact_trace_error(const ExactMap& map, const Rational& y, std::span<const double> states);

struct ModulusResult {
    double delta_hat = 0.0;
    std::string diagnostic;
};

/// Largest delta (bisection, relative tolerance 2^-10) for which every trial
/// delta-pseudo-orbit of the given horizon is eps-traced.
ModulusResult shadowing_modulus_report(const MapSpec& map, double eps, std::size_t trials,
                                       std::size_t horizon, std::uint64_t seed);
double shadowing_modulus(const MapSpec& map, double eps, std::size_t trials, std::size_t horizon,
                         std::uint64_t seed);

std::string to_csv(const PseudoOrbit& po);
PseudoOrbit pseudo_orbit_from_csv(const std::string& text, const std::string& source = "<csv>");
std::string to_json(const TraceResult& result);

// Full shift.

bool is_shift_pseudo_orbit(const ShiftSystem& sys, const std::vector<ShiftSystem::Word>& po,
                           double delta);
/// Words of length word_length; consecutive words agree after one shift on
/// indices 0..m, so the sequence is a metric_base^m pseudo-orbit.
std::vector<ShiftSystem::Word> shift_pseudo_orbit(const ShiftSystem& sys, std::size_t n,
                                                  std::size_t word_length, std::size_t m,
                                                  std::uint64_t seed);
/// Point built from the leading symbols of the words, then the tail of the last word.
ShiftSystem::Word trace_shift(const std::vector<ShiftSystem::Word>& po);
/// max_j d(shift^j y, x^(j)).
double shift_trace_error(const ShiftSystem& sys, const ShiftSystem::Word& y,
                         const std::vector<ShiftSystem::Word>& po);

/// Derives an independent 64-bit seed from (seed, stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace shadowkit
