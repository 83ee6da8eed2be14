#include "shadowkit/birkhoff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shadowkit/errors.hpp"

namespace shadowkit {

namespace {

double as_double(double x) { return x; }
double as_double(const Rational& x) { return x.convert_to<double>(); }
double step(const MapSpec& m, double x) { return eval(m, x); }
Rational step(const ExactMap& m, const Rational& x) { return m(x); }

template <class Map, class State>
std::vector<double> running_impl(const Map& map, const Observable& phi, State x, std::size_t n) {
    if (n == 0) throw ParameterError("birkhoff: n must be >= 1");
    std::vector<double> out;
    out.reserve(n);
    long double sum = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        sum += phi(as_double(x));
        out.push_back(double(sum / (long double)(i + 1)));
        if (i + 1 < n) x = step(map, x);
    }
    return out;
}

template <class Map, class State>
BirkhoffReport report_impl(const Map& map, const Observable& phi, const State& x, std::size_t n_max,
                           double tail_fraction) {
    if (n_max < 100) throw ParameterError("irregularity_report: n_max must be >= 100");
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw ParameterError("irregularity_report: tail_fraction must be in (0,1)");
    const auto avg = running_impl(map, phi, x, n_max);
    const std::size_t tail = std::max<std::size_t>(1, std::size_t(std::ceil(tail_fraction * double(n_max))));
    BirkhoffReport r;
    r.tail_start = tail;
    r.n_max = n_max;
    r.liminf_est = r.limsup_est = avg[tail - 1];
    for (std::size_t n = tail; n <= n_max; ++n) {
        r.liminf_est = std::min(r.liminf_est, avg[n - 1]);
        r.limsup_est = std::max(r.limsup_est, avg[n - 1]);
    }
    r.gap = r.limsup_est - r.liminf_est;
    const std::size_t stride = std::max<std::size_t>(1, n_max / 2000);
    for (std::size_t n = stride; n <= n_max; n += stride) r.running.emplace_back(n, avg[n - 1]);
    if (r.running.back().first != n_max) r.running.emplace_back(n_max, avg[n_max - 1]);
    return r;
}

}  // namespace

double birkhoff_average(const MapSpec& map, const Observable& phi, double x, std::size_t n) {
    return running_impl(map, phi, x, n).back();
}

double birkhoff_average(const ExactMap& map, const Observable& phi, const Rational& x, std::size_t n) {
    return running_impl(map, phi, x, n).back();
}

std::vector<double> running_averages(const MapSpec& map, const Observable& phi, double x, std::size_t n) {
    return running_impl(map, phi, x, n);
}

std::vector<double> running_averages(const ExactMap& map, const Observable& phi, const Rational& x,
                                     std::size_t n) {
    return running_impl(map, phi, x, n);
}

BirkhoffReport irregularity_report(const MapSpec& map, const Observable& phi, double x,
                                   std::size_t n_max, double tail_fraction) {
    return report_impl(map, phi, x, n_max, tail_fraction);
}

BirkhoffReport irregularity_report(const ExactMap& map, const Observable& phi, const Rational& x,
                                   std::size_t n_max, double tail_fraction) {
    return report_impl(map, phi, x, n_max, tail_fraction);
}

BirkhoffReport report_from_rows(std::vector<std::pair<std::size_t, double>> rows, std::size_t tail_start) {
    BirkhoffReport r;
    r.tail_start = tail_start;
    bool any = false;
    for (const auto& [n, a] : rows) {
        r.n_max = std::max(r.n_max, n);
        if (n < tail_start) continue;
        r.liminf_est = any ? std::min(r.liminf_est, a) : a;
        r.limsup_est = any ? std::max(r.limsup_est, a) : a;
        any = true;
    }
    if (!any) throw ParameterError("report_from_rows: no row at or beyond tail_start");
    r.gap = r.limsup_est - r.liminf_est;
    r.running = std::move(rows);
    return r;
}

bool level_set_member(const BirkhoffReport& r, double a, double theta) {
    if (!(theta > 0.0)) throw ParameterError("level_set_member: theta must be positive");
    return a - theta < r.liminf_est && r.limsup_est < a + theta;
}

bool level_set_member(const MapSpec& map, const Observable& phi, double x, double a, double theta,
                      std::size_t n_max) {
    return level_set_member(irregularity_report(map, phi, x, n_max), a, theta);
}

namespace {

template <class Map, class State>
EmpiricalMeasure measure_impl(const Map& map, State x, std::size_t n, const GridPartition& grid) {
    if (n == 0) throw ParameterError("empirical_measure: n must be >= 1");
    EmpiricalMeasure mu{grid, std::vector<double>(grid.cell_count, 0.0), n};
    std::vector<std::size_t> counts(grid.cell_count, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++counts[grid.cell_of(as_double(x))];
        if (i + 1 < n) x = step(map, x);
    }
    for (std::size_t c = 0; c < counts.size(); ++c) mu.weights[c] = double(counts[c]) / double(n);
    return mu;
}

}  // namespace

EmpiricalMeasure empirical_measure(const MapSpec& map, double x, std::size_t n, const GridPartition& grid) {
    return measure_impl(map, x, n, grid);
}

EmpiricalMeasure empirical_measure(const ExactMap& map, const Rational& x, std::size_t n,
                                   const GridPartition& grid) {
    return measure_impl(map, x, n, grid);
}

EmpiricalMeasure empirical_measure(const std::vector<double>& states, const GridPartition& grid) {
    if (states.empty()) throw ParameterError("empirical_measure: no states");
    EmpiricalMeasure mu{grid, std::vector<double>(grid.cell_count, 0.0), states.size()};
    std::vector<std::size_t> counts(grid.cell_count, 0);
    for (double s : states) ++counts[grid.cell_of(s)];
    for (std::size_t c = 0; c < counts.size(); ++c) mu.weights[c] = double(counts[c]) / double(states.size());
    return mu;
}

EmpiricalMeasure uniform_measure(const GridPartition& grid) {
    EmpiricalMeasure mu{grid, std::vector<double>(grid.cell_count, 0.0), 0};
    for (std::size_t c = 0; c < grid.cell_count; ++c) mu.weights[c] = grid.cell(c).width();
    return mu;
}

double bl_test_function(int k, double x) {
    if (k == 0) return 0.5 * x;
    const double kp = k * std::numbers::pi;
    return std::sin(kp * x) / (1.0 + kp);
}

double integrate(const EmpiricalMeasure& mu, const std::function<double(double)>& f) {
    double s = 0.0;
    for (std::size_t c = 0; c < mu.weights.size(); ++c)
        if (mu.weights[c] != 0.0) s += mu.weights[c] * f(mu.grid.midpoint(c));
    return s;
}

double bl_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    if (!(mu.grid == nu.grid) || mu.weights.size() != nu.weights.size())
        throw ParameterError("bl_distance: measures live on different grids");
    double d = 0.0;
    for (int k = 0; k < kBlFamilySize; ++k) {
        // integrate the signed difference directly
        double diff = 0.0;
        for (std::size_t c = 0; c < mu.weights.size(); ++c) {
            const double w = mu.weights[c] - nu.weights[c];
            if (w != 0.0) diff += w * bl_test_function(k, mu.grid.midpoint(c));
        }
        d += std::ldexp(std::abs(diff), -(k + 1));
    }
    return d;
}

}  // namespace shadowkit
