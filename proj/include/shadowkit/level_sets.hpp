#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "shadowkit/map.hpp"
#include "shadowkit/observable.hpp"

namespace shadowkit {

/// m(D_n) with D_n = {x : (1/n) sum_{i<n} phi(T^i x) > c}, exact for PL phi.
double dn_measure_exact(const MapSpec& map, const Observable& phi, double c, std::size_t n);
/// m(D_1), ..., m(D_{n_max}) from one refinement pass.
std::vector<double> dn_measure_exact_series(const MapSpec& map, const Observable& phi, double c,
                                            std::size_t n_max);

struct McEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
};

/// Fraction of uniform samples in D_n. Samples are drawn in fixed chunks with
/// per-chunk seeds, so the value does not depend on the thread count.
McEstimate dn_measure_mc(const MapSpec& map, const Observable& phi, double c, std::size_t n,
                         std::size_t samples, std::uint64_t seed);

struct CandidateMeasure {
    std::string description;
    double integral = 0.0;  // int phi dnu
    double entropy = 0.0;   // h_nu
    double value = 0.0;     // h_nu - xi
};

struct RateBound {
    /// -inf when no candidate has int phi dnu > c.
    double bound = 0.0;
    std::string witness;
    std::string explanation;
    std::vector<CandidateMeasure> qualifying;
};

struct RateBoundOptions {
    std::size_t long_orbit_length = 20000;
    std::size_t katok_sample = 4000;
    double katok_eps = 0.05;
    std::uint64_t seed = 1;
};

/// Sup of h_nu - xi over periodic-orbit measures (period <= max_period) and
/// the empirical measure of a long noisy orbit whose entropy is a Katok
/// estimate clamped to [0, lap entropy]. Candidates within 1e-9 of c are excluded.
RateBound rate_lower_bound(const MapSpec& map, const Observable& phi, double xi_const, double c,
                           std::size_t max_period, const RateBoundOptions& options = {});

struct RateRow {
    std::size_t n = 0;
    bool exact = true;
    double m_Dn = 0.0;
    double rate = 0.0;
    double stderr_ = 0.0;
};

struct RateReport {
    double c = 0.0;
    std::string phi_label;
    double xi_const = 0.0;
    std::vector<RateRow> series;
    double lower_bound = 0.0;
    std::string bound_witness;
};

struct SeriesOptions {
    /// Exact refinement up to this n, Monte Carlo beyond.
    std::size_t exact_up_to = 16;
    std::size_t mc_samples = 200000;
    std::uint64_t seed = 1;
};

std::vector<RateRow> rate_series(const MapSpec& map, const Observable& phi, double c, std::size_t n_lo,
                                 std::size_t n_hi, const SeriesOptions& options = {});

struct TheoremVerdict {
    bool holds = false;
    /// No candidate measure qualified, so there is no finite bound to test.
    bool vacuous = false;
    double bound = 0.0;
    double min_margin = 0.0;
    std::vector<double> margins;
    RateReport report;
};

/// Checks min_n (1/n) log m(D_n) >= bound - tol over n in [n_lo, n_hi].
TheoremVerdict check_theorem_vminus(const MapSpec& map, const Observable& phi, double xi_const, double c,
                                    std::size_t n_lo, std::size_t n_hi, double tol, std::size_t max_period,
                                    const SeriesOptions& series = {}, const RateBoundOptions& bound = {});

}  // namespace shadowkit
