#pragma once
// Independent reference computations used by the tests. None of these call
// into the library's estimators; they only need the map's node table.

#include <cmath>
#include <cstddef>
#include <vector>

#include <shadowkit/map.hpp>

namespace oracle {

using shadowkit::MapSpec;
using shadowkit::Rational;

inline double apply(const MapSpec& m, double x) {
    const auto& bp = m.breakpoints();
    const auto& v = m.values();
    for (std::size_t k = 0; k + 1 < bp.size(); ++k)
        if (x <= bp[k + 1]) return v[k] + (v[k + 1] - v[k]) * (x - bp[k]) / (bp[k + 1] - bp[k]);
    return v.back();
}

inline double iterate(const MapSpec& m, double x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x = apply(m, x);
    return x;
}

inline double bowen(const MapSpec& m, double x, double y, std::size_t n) {
    double d = 0;
    for (std::size_t i = 0; i < n; ++i) {
        d = std::max(d, std::abs(x - y));
        x = apply(m, x);
        y = apply(m, y);
    }
    return d;
}

// Laps of T^n counted from sign changes of the difference sequence on a fine grid.
inline std::size_t grid_laps(const MapSpec& m, std::size_t n, std::size_t grid) {
    std::size_t laps = 1;
    int dir = 0;
    double prev = iterate(m, 0.0, n);
    for (std::size_t i = 1; i <= grid; ++i) {
        const double y = iterate(m, double(i) / double(grid), n);
        const int d = y > prev ? 1 : (y < prev ? -1 : 0);
        if (d != 0 && dir != 0 && d != dir) ++laps;
        if (d != 0) dir = d;
        prev = y;
    }
    return laps;
}

// Number of periodic orbits of minimal period p of the full 2-branch tent map.
inline std::size_t tent2_cycle_count(std::size_t p) {
    auto mobius = [](std::size_t n) {
        int mu = 1;
        for (std::size_t q = 2; q * q <= n; ++q) {
            if (n % q == 0) {
                n /= q;
                if (n % q == 0) return 0;
                mu = -mu;
            }
        }
        if (n > 1) mu = -mu;
        return mu;
    };
    long long total = 0;
    for (std::size_t d = 1; d <= p; ++d)
        if (p % d == 0) total += mobius(p / d) * (1LL << d);
    return std::size_t(total / (long long)p);
}

// m{x : sum_{i<n} T^i x > c n} for the coordinate observable, by exact
// enumeration of the affine pieces of x -> (T^i x)_{i<n}.
inline Rational coordinate_level_measure(const MapSpec& m, Rational c, std::size_t n) {
    struct Piece {
        Rational lo, hi, a, b, p, q;  // T^i x = a x + b, running sum = p x + q
    };
    std::vector<Rational> bp, val;
    for (double x : m.breakpoints()) bp.emplace_back(x);
    for (double x : m.values()) val.emplace_back(x);
    std::vector<Piece> pieces{{0, 1, 1, 0, 1, 0}};
    for (std::size_t i = 1; i < n; ++i) {
        std::vector<Piece> next;
        for (const auto& pc : pieces) {
            for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
                // x with a x + b in [bp_k, bp_k+1]
                Rational l = pc.lo, h = pc.hi;
                if (pc.a != 0) {
                    Rational x1 = (bp[k] - pc.b) / pc.a, x2 = (bp[k + 1] - pc.b) / pc.a;
                    if (x1 > x2) std::swap(x1, x2);
                    l = std::max(l, x1);
                    h = std::min(h, x2);
                } else if (pc.b < bp[k] || pc.b > bp[k + 1]) {
                    continue;
                }
                if (l >= h) continue;
                const Rational s = (val[k + 1] - val[k]) / (bp[k + 1] - bp[k]);
                const Rational na = s * pc.a, nb = val[k] + s * (pc.b - bp[k]);
                next.push_back({l, h, na, nb, pc.p + na, pc.q + nb});
            }
        }
        pieces = std::move(next);
    }
    Rational total = 0;
    const Rational target = c * Rational(n);
    for (const auto& pc : pieces) {
        Rational l = pc.lo, h = pc.hi;
        if (pc.p == 0) {
            if (pc.q > target) total += h - l;
            continue;
        }
        const Rational x0 = (target - pc.q) / pc.p;
        if (pc.p > 0) l = std::max(l, x0);
        else h = std::min(h, x0);
        if (h > l) total += h - l;
    }
    return total;
}

}  // namespace oracle
