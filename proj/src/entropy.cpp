#include "shadowkit/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "shadowkit/errors.hpp"
#include "shadowkit/intervals.hpp"
#include "shadowkit/parallel.hpp"

namespace shadowkit {

double fit_slope(std::span<const std::pair<double, double>> pts) {
    if (pts.size() < 2) throw ParameterError("fit_slope: need at least two points");
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= double(pts.size());
    my /= double(pts.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    return sxy / sxx;
}

std::vector<double> grid_pool(std::size_t size) {
    std::vector<double> pool(size);
    for (std::size_t i = 0; i < size; ++i) pool[i] = (double(i) + 0.5) / double(size);
    return pool;
}

OrbitTable::OrbitTable(const MapSpec& map, std::span<const double> points, std::size_t n)
    : count_(points.size()), n_(n), data_(points.size() * n) {
    if (n == 0) throw ParameterError("OrbitTable: n must be >= 1");
    parallel_for(count_, [&](std::size_t i) {
        double* r = data_.data() + i * n_;
        r[0] = points[i];
        for (std::size_t j = 1; j < n_; ++j) r[j] = eval(map, r[j - 1]);
    });
}

OrbitTable::OrbitTable(std::vector<std::vector<double>> orbits, std::size_t n)
    : count_(orbits.size()), n_(n), data_(orbits.size() * n) {
    for (std::size_t i = 0; i < count_; ++i) {
        if (orbits[i].size() < n) throw ParameterError("OrbitTable: orbit shorter than n");
        std::copy_n(orbits[i].begin(), n, data_.begin() + std::ptrdiff_t(i * n));
    }
}

double OrbitTable::distance(std::size_t i, std::size_t j, std::size_t m) const {
    const double* a = row(i);
    const double* b = row(j);
    double d = 0.0;
    for (std::size_t k = 0; k < m; ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

namespace {

void check_args(std::size_t n, double eps) {
    if (n == 0) throw ParameterError("entropy: n must be >= 1");
    if (!(eps > 0.0)) throw ParameterError("entropy: eps must be positive");
}

std::vector<std::size_t> ascending(const OrbitTable& t) {
    std::vector<std::size_t> order(t.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return t.start(a) < t.start(b); });
    return order;
}

// Points within closed d_n-distance eps of each point (itself included).
std::vector<std::vector<std::uint32_t>> neighbours(const OrbitTable& t, std::size_t n, double eps) {
    const auto order = ascending(t);
    std::vector<std::vector<std::uint32_t>> nb(t.size());
    parallel_for(order.size(), [&](std::size_t r) {
        const std::size_t i = order[r];
        auto& out = nb[i];
        for (std::size_t q = r; q-- > 0;) {
            const std::size_t j = order[q];
            if (t.start(i) - t.start(j) > eps) break;
            if (t.distance(i, j, n) <= eps) out.push_back(std::uint32_t(j));
        }
        out.push_back(std::uint32_t(i));
        for (std::size_t q = r + 1; q < order.size(); ++q) {
            const std::size_t j = order[q];
            if (t.start(j) - t.start(i) > eps) break;
            if (t.distance(i, j, n) <= eps) out.push_back(std::uint32_t(j));
        }
    });
    return nb;
}

// Lazy greedy max coverage until `target` points are covered (at least one ball).
std::size_t greedy_cover(const std::vector<std::vector<std::uint32_t>>& nb, std::size_t target) {
    std::vector<char> covered(nb.size(), 0);
    using Entry = std::pair<std::size_t, long>;  // (gain, -index)
    std::priority_queue<Entry> heap;
    for (std::size_t i = 0; i < nb.size(); ++i) heap.push({nb[i].size(), -long(i)});
    std::size_t done = 0;
    std::size_t balls = 0;
    while (!heap.empty() && (balls == 0 || done < target)) {
        auto [gain, neg] = heap.top();
        heap.pop();
        const std::size_t i = std::size_t(-neg);
        std::size_t fresh = 0;
        for (auto j : nb[i]) fresh += covered[j] ? 0 : 1;
        if (fresh != gain) {
            if (fresh > 0) heap.push({fresh, neg});
            continue;
        }
        if (fresh == 0) break;
        for (auto j : nb[i]) covered[j] = 1;
        done += fresh;
        ++balls;
    }
    return balls;
}

}  // namespace

std::vector<std::size_t> separated_set(const OrbitTable& t, std::size_t n, double eps) {
    check_args(n, eps);
    if (n > t.length()) throw ParameterError("separated_set: n exceeds the tabulated orbit length");
    if (t.size() == 0) throw ParameterError("separated_set: empty pool");
    std::vector<std::size_t> kept;
    for (std::size_t i : ascending(t)) {
        bool far = true;
        for (std::size_t q = kept.size(); q-- > 0;) {
            const std::size_t j = kept[q];
            if (t.start(i) - t.start(j) > eps) break;
            if (t.distance(i, j, n) <= eps) {
                far = false;
                break;
            }
        }
        if (far) kept.push_back(i);
    }
    return kept;
}

std::vector<std::size_t> separated_set(const MapSpec& map, std::span<const double> pool, std::size_t n,
                                       double eps) {
    check_args(n, eps);
    if (pool.empty()) throw ParameterError("separated_set: empty pool");
    return separated_set(OrbitTable(map, pool, n), n, eps);
}

std::size_t spanning_number(const OrbitTable& t, std::size_t n, double eps) {
    check_args(n, eps);
    if (t.size() == 0) throw ParameterError("spanning_number: empty pool");
    const std::size_t greedy = greedy_cover(neighbours(t, n, eps), t.size());
    // a maximal separated set is itself a cover
    return std::min(greedy, separated_set(t, n, eps).size());
}

std::size_t spanning_number(const MapSpec& map, std::span<const double> pool, std::size_t n, double eps) {
    check_args(n, eps);
    if (pool.empty()) throw ParameterError("spanning_number: empty pool");
    return spanning_number(OrbitTable(map, pool, n), n, eps);
}

std::vector<double> lap_counts(const MapSpec& map, std::size_t n_max, std::size_t cap) {
    // Each lap of T^n is stored as the values of T^n at its two ends, left to right.
    struct Lap {
        double from;
        double to;
    };
    auto direction = [](const Lap& l) { return l.to > l.from ? 1 : (l.to < l.from ? -1 : 0); };
    const auto& bp = map.breakpoints();
    std::vector<Lap> laps{{0.0, 1.0}};
    std::vector<double> counts;
    for (std::size_t n = 1; n <= n_max; ++n) {
        std::vector<Lap> next;
        next.reserve(laps.size() * 2);
        auto push = [&](Lap piece) {
            if (!next.empty()) {
                const int d = direction(piece);
                const int prev = direction(next.back());
                if (d == 0 || prev == 0 || d == prev) {
                    next.back().to = piece.to;
                    return;
                }
            }
            next.push_back(piece);
        };
        for (const auto& lap : laps) {
            const double lo = std::min(lap.from, lap.to);
            const double hi = std::max(lap.from, lap.to);
            std::vector<double> pts{lap.from};
            auto first = std::upper_bound(bp.begin(), bp.end(), lo);
            auto last = std::lower_bound(bp.begin(), bp.end(), hi);
            if (lap.to >= lap.from)
                for (auto it = first; it < last; ++it) pts.push_back(*it);
            else
                for (auto it = last; it > first;) pts.push_back(*--it);
            pts.push_back(lap.to);
            for (std::size_t k = 0; k + 1 < pts.size(); ++k)
                push({eval(map, pts[k]), eval(map, pts[k + 1])});
        }
        laps = std::move(next);
        if (laps.size() > cap)
            throw ResolutionError("lap_counts: more than " + std::to_string(cap) + " laps at n = " +
                                  std::to_string(n) + "; max feasible n = " + std::to_string(n - 1));
        counts.push_back(double(laps.size()));
    }
    return counts;
}

EntropyEstimate lap_entropy(const MapSpec& map, std::size_t n_max) {
    if (n_max < 2) throw ParameterError("lap_entropy: n_max must be >= 2");
    const auto counts = lap_counts(map, n_max);
    EntropyEstimate e;
    e.method = "laps";
    for (std::size_t n = 1; n <= n_max; ++n) e.samples.emplace_back(n, std::log(counts[n - 1]));
    e.fit_lo = (n_max + 1) / 2;
    e.fit_hi = n_max;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t n = e.fit_lo; n <= e.fit_hi; ++n) pts.emplace_back(double(n), e.samples[n - 1].second);
    e.extrapolated = fit_slope(pts);
    return e;
}

namespace {

EntropyEstimate counting_estimate(std::string method, const std::vector<std::size_t>& ns,
                                  const std::vector<std::size_t>& counts, std::size_t limit) {
    EntropyEstimate e;
    e.method = std::move(method);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        const double lc = std::log(double(counts[k]));
        e.samples.emplace_back(ns[k], lc);
        if (counts[k] <= limit) pts.emplace_back(double(ns[k]), lc);
    }
    if (pts.size() < 2) {
        pts.clear();
        for (std::size_t k = 0; k < std::min<std::size_t>(2, ns.size()); ++k)
            pts.emplace_back(double(ns[k]), e.samples[k].second);
    }
    e.fit_lo = std::size_t(pts.front().first);
    e.fit_hi = std::size_t(pts.back().first);
    e.extrapolated = pts.size() >= 2 ? fit_slope(pts) : 0.0;
    return e;
}

}  // namespace

EntropyEstimate separated_entropy(const MapSpec& map, std::span<const double> pool, std::size_t n_lo,
                                  std::size_t n_hi, double eps) {
    if (n_lo == 0 || n_hi < n_lo) throw ParameterError("separated_entropy: bad n range");
    const OrbitTable table(map, pool, n_hi);
    std::vector<std::size_t> ns, counts;
    for (std::size_t n = n_lo; n <= n_hi; ++n) {
        ns.push_back(n);
        counts.push_back(separated_set(table, n, eps).size());
    }
    auto e = counting_estimate("separated", ns, counts, pool.size() / 3);
    e.eps = eps;
    return e;
}

EntropyEstimate spanning_entropy(const MapSpec& map, std::span<const double> pool, std::size_t n_lo,
                                 std::size_t n_hi, double eps) {
    if (n_lo == 0 || n_hi < n_lo) throw ParameterError("spanning_entropy: bad n range");
    const OrbitTable table(map, pool, n_hi);
    std::vector<std::size_t> ns, counts;
    for (std::size_t n = n_lo; n <= n_hi; ++n) {
        ns.push_back(n);
        counts.push_back(spanning_number(table, n, eps));
    }
    auto e = counting_estimate("spanning", ns, counts, pool.size() / 3);
    e.eps = eps;
    return e;
}

std::size_t katok_count(const OrbitTable& t, std::size_t n, double eps, double delta) {
    check_args(n, eps);
    if (t.size() == 0) throw ParameterError("katok_entropy: empty sample");
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("katok_entropy: delta must be in (0,1)");
    const auto target = std::size_t(std::ceil((1.0 - delta) * double(t.size())));
    return greedy_cover(neighbours(t, n, eps), target);
}

std::size_t katok_entropy(const MapSpec& map, std::span<const double> sample, std::size_t n, double eps,
                          double delta) {
    if (sample.empty()) throw ParameterError("katok_entropy: empty sample");
    check_args(n, eps);
    return katok_count(OrbitTable(map, sample, n), n, eps, delta);
}

EntropyEstimate katok_estimate(const MapSpec& map, std::span<const double> sample, std::size_t n_lo,
                               std::size_t n_hi, double eps, double delta) {
    if (n_lo == 0 || n_hi < n_lo) throw ParameterError("katok_estimate: bad n range");
    if (sample.empty()) throw ParameterError("katok_entropy: empty sample");
    const OrbitTable table(map, sample, n_hi);
    EntropyEstimate e;
    e.method = "katok";
    e.eps = eps;
    e.delta_katok = delta;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t n = n_lo; n <= n_hi; ++n) {
        const double lc = std::log(double(katok_count(table, n, eps, delta)));
        e.samples.emplace_back(n, lc);
    }
    // slope over the upper half of the range
    e.fit_lo = n_lo + (n_hi - n_lo) / 2;
    e.fit_hi = n_hi;
    for (const auto& [n, lc] : e.samples)
        if (n >= e.fit_lo) pts.emplace_back(double(n), lc);
    e.extrapolated = pts.size() >= 2 ? fit_slope(pts) : e.samples.back().second / double(n_hi);
    return e;
}

std::vector<double> bowen_ball_measures(const MapSpec& map, double x, std::size_t n_max, double eps) {
    if (n_max == 0) throw ParameterError("bowen_ball_measure: n must be >= 1");
    if (!(eps > 0.0)) throw ParameterError("bowen_ball_measure: eps must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("bowen_ball_measure: x outside [0,1]");
    const ExactMap exact(map);
    Rational centre(x);
    BranchSet set({std::max(0.0, x - eps), std::min(1.0, x + eps)}, std::size_t(1) << 20);
    std::vector<double> out{set.measure()};
    for (std::size_t j = 1; j < n_max; ++j) {
        centre = exact(centre);
        const double c = centre.convert_to<double>();
        set.step(map);
        set.restrict_to({c - eps, c + eps});
        out.push_back(set.measure());
    }
    return out;
}

double bowen_ball_measure(const MapSpec& map, double x, std::size_t n, double eps) {
    return bowen_ball_measures(map, x, n, eps).back();
}

EntropyEstimate local_reference_entropy(const MapSpec& map, double x, std::size_t n_max, double eps) {
    const auto m = bowen_ball_measures(map, x, n_max, eps);
    EntropyEstimate e;
    e.method = "local_reference";
    e.eps = eps;
    for (std::size_t n = 1; n <= n_max; ++n) e.samples.emplace_back(n, -std::log(m[n - 1]) / double(n));
    e.extrapolated = e.samples.back().second;
    e.fit_lo = e.fit_hi = n_max;
    return e;
}

VMinusReport check_v_minus(const MapSpec& map, double xi_const, double eps, double C,
                           std::span<const double> sample, std::size_t n_max) {
    if (!(xi_const >= 0.0)) throw ParameterError("check_v_minus: xi must be a nonnegative constant");
    if (!(C > 0.0)) throw ParameterError("check_v_minus: C must be positive");
    std::vector<std::vector<double>> measures(sample.size());
    parallel_for(sample.size(), [&](std::size_t i) { measures[i] = bowen_ball_measures(map, sample[i], n_max, eps); });
    VMinusReport r;
    bool first = true;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        for (std::size_t n = 1; n <= n_max; ++n) {
            const double m = measures[i][n - 1];
            const double log_bound = std::log(C) - double(n) * xi_const;
            const double margin = (m > 0.0 ? std::log(m) : -INFINITY) - log_bound;
            ++r.checks;
            if (first || margin < r.worst_margin) {
                r.worst_margin = margin;
                r.worst_x = sample[i];
                r.worst_n = n;
                first = false;
            }
        }
    }
    r.holds = r.worst_margin >= -1e-12;
    return r;
}

}  // namespace shadowkit
