#include "shadowkit/level_sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "shadowkit/entropy.hpp"
#include "shadowkit/errors.hpp"
#include "shadowkit/intervals.hpp"
#include "shadowkit/parallel.hpp"
#include "shadowkit/periodic.hpp"
#include "shadowkit/shadowing.hpp"

namespace shadowkit {

std::vector<double> dn_measure_exact_series(const MapSpec& map, const Observable& phi, double c,
                                            std::size_t n_max) {
    if (n_max == 0) throw ParameterError("dn_measure_exact: n must be >= 1");
    if (!phi.is_piecewise_linear())
        throw ParameterError("dn_measure_exact: observable " + phi.label() +
                             " is not piecewise linear; use the Monte Carlo estimator");
    BranchSet set({0.0, 1.0});
    std::vector<double> out;
    try {
        for (std::size_t i = 0; i < n_max; ++i) {
            if (i > 0) set.step(map);
            set.accumulate(phi);
            out.push_back(std::clamp(set.measure_sum_above(c * double(i + 1)), 0.0, 1.0));
        }
    } catch (const ResolutionError& e) {
        throw ResolutionError(std::string(e.what()) + " at n = " + std::to_string(out.size() + 1) +
                              "; use dn_measure_mc");
    }
    return out;
}

double dn_measure_exact(const MapSpec& map, const Observable& phi, double c, std::size_t n) {
    return dn_measure_exact_series(map, phi, c, n).back();
}

McEstimate dn_measure_mc(const MapSpec& map, const Observable& phi, double c, std::size_t n,
                         std::size_t samples, std::uint64_t seed) {
    if (n == 0) throw ParameterError("dn_measure_mc: n must be >= 1");
    if (samples < 1000) throw ParameterError("dn_measure_mc: samples must be >= 1000");
    constexpr std::size_t chunk = 4096;
    const std::size_t chunks = (samples + chunk - 1) / chunk;
    std::vector<std::size_t> hits(chunks, 0);
    parallel_for(chunks, [&](std::size_t k) {
        std::mt19937_64 rng(derive_seed(seed, k));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const std::size_t count = std::min(chunk, samples - k * chunk);
        std::size_t h = 0;
        for (std::size_t s = 0; s < count; ++s) {
            double x = u(rng);
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                sum += phi(x);
                if (i + 1 < n) x = eval(map, x);
            }
            if (sum > c * double(n)) ++h;
        }
        hits[k] = h;
    });
    std::size_t total = 0;
    for (auto h : hits) total += h;
    const double p = double(total) / double(samples);
    return {p, std::sqrt(p * (1.0 - p) / double(samples))};
}

RateBound rate_lower_bound(const MapSpec& map, const Observable& phi, double xi_const, double c,
                           std::size_t max_period, const RateBoundOptions& opt) {
    if (max_period == 0 || max_period > 14)
        throw ParameterError("rate_lower_bound: max_period must be in [1, 14]");
    RateBound out;
    out.bound = -std::numeric_limits<double>::infinity();
    std::vector<CandidateMeasure> all;

    for (const auto& orb : periodic_orbits(map, max_period)) {
        std::ostringstream os;
        os.precision(10);
        os << "periodic orbit of period " << orb.period() << " through " << orb.states.front();
        all.push_back({os.str(), orb.average(phi), 0.0, -xi_const});
    }

    // long noisy orbit: noise of size 2^-40 keeps double orbits from collapsing
    {
        std::mt19937_64 rng(derive_seed(opt.seed, 0x10a9));
        const double x0 = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const auto po = perturbed_orbit(map, x0, opt.long_orbit_length, std::ldexp(1.0, -40),
                                        derive_seed(opt.seed, 0x10aa));
        double sum = 0.0;
        for (double s : po.states) sum += phi(s);
        const double integral = sum / double(po.states.size());
        const std::size_t burn = po.states.size() / 10;
        const std::size_t take = std::min(opt.katok_sample, po.states.size() - burn);
        std::vector<double> sample(po.states.begin() + std::ptrdiff_t(burn),
                                   po.states.begin() + std::ptrdiff_t(burn + take));
        const double h_top = std::max(0.0, lap_entropy(map, 16).extrapolated);
        double h = katok_estimate(map, sample, 2, 8, opt.katok_eps, 0.5).extrapolated;
        h = std::clamp(h, 0.0, h_top);
        std::ostringstream os;
        os.precision(6);
        os << "empirical measure of a noisy orbit of length " << po.states.size()
           << " (Katok entropy " << h << ")";
        all.push_back({os.str(), integral, h, h - xi_const});
    }

    for (const auto& cand : all) {
        if (!(cand.integral > c + 1e-9)) continue;
        out.qualifying.push_back(cand);
        if (cand.value > out.bound) {
            out.bound = cand.value;
            out.witness = cand.description;
        }
    }
    if (out.qualifying.empty()) {
        std::ostringstream os;
        os << "no candidate measure has integral of " << phi.label() << " above c = " << c;
        out.explanation = os.str();
    }
    return out;
}

std::vector<RateRow> rate_series(const MapSpec& map, const Observable& phi, double c, std::size_t n_lo,
                                 std::size_t n_hi, const SeriesOptions& opt) {
    if (n_lo == 0 || n_hi < n_lo) throw ParameterError("rate_series: bad n range");
    std::vector<RateRow> rows;
    std::vector<double> exact;
    const std::size_t exact_hi = phi.is_piecewise_linear() ? std::min(n_hi, opt.exact_up_to) : 0;
    if (exact_hi >= n_lo) exact = dn_measure_exact_series(map, phi, c, exact_hi);
    for (std::size_t n = n_lo; n <= n_hi; ++n) {
        RateRow r;
        r.n = n;
        if (n <= exact.size()) {
            r.m_Dn = exact[n - 1];
        } else {
            const auto mc = dn_measure_mc(map, phi, c, n, opt.mc_samples, derive_seed(opt.seed, n));
            r.exact = false;
            r.m_Dn = mc.estimate;
            r.stderr_ = mc.stderr_;
        }
        r.rate = r.m_Dn > 0.0 ? std::log(r.m_Dn) / double(n) : -std::numeric_limits<double>::infinity();
        rows.push_back(r);
    }
    return rows;
}

TheoremVerdict check_theorem_vminus(const MapSpec& map, const Observable& phi, double xi_const, double c,
                                    std::size_t n_lo, std::size_t n_hi, double tol, std::size_t max_period,
                                    const SeriesOptions& series, const RateBoundOptions& bound_opt) {
    const auto bound = rate_lower_bound(map, phi, xi_const, c, max_period, bound_opt);
    TheoremVerdict v;
    v.bound = bound.bound;
    v.report.c = c;
    v.report.phi_label = phi.label();
    v.report.xi_const = xi_const;
    v.report.lower_bound = bound.bound;
    v.report.bound_witness = bound.qualifying.empty() ? bound.explanation : bound.witness;
    v.report.series = rate_series(map, phi, c, n_lo, n_hi, series);
    v.min_margin = std::numeric_limits<double>::infinity();
    for (const auto& r : v.report.series) {
        const double m = r.rate - (bound.bound - tol);
        v.margins.push_back(m);
        v.min_margin = std::min(v.min_margin, m);
    }
    // a -inf bound is reported as a negative verdict rather than a vacuous pass
    v.vacuous = bound.qualifying.empty();
    v.holds = !v.vacuous && v.min_margin >= 0.0;
    return v;
}

}  // namespace shadowkit
