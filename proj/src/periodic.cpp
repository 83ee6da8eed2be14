#include "shadowkit/periodic.hpp"

#include <algorithm>
#include <cmath>

#include "shadowkit/errors.hpp"

namespace shadowkit {

double PeriodicOrbit::average(const Observable& phi) const {
    double s = 0.0;
    for (double x : states) s += phi(x);
    return s / double(states.size());
}

namespace {

struct Search {
    const MapSpec& map;
    const ExactMap& exact;
    std::size_t period;
    std::size_t cap;
    std::size_t visited = 0;
    std::vector<Rational> found;

    // T^depth y = a y + b (approximate) and A y + B (exact) on [lo, hi].
    void descend(std::size_t depth, double lo, double hi, double a, double b, const Rational& A,
                 const Rational& B) {
        if (++visited > cap)
            throw ResolutionError("periodic_orbits: more than " + std::to_string(cap) +
                                  " branches at period " + std::to_string(period));
        if (depth == period) {
            if (A == 1) return;
            Rational y = B / (1 - A);
            const double yd = y.convert_to<double>();
            const double slack = 1e-9 * std::max(1.0, hi - lo);
            if (yd < lo - slack || yd > hi + slack || y < 0 || y > 1) return;
            Rational z = y;
            for (std::size_t i = 0; i < period; ++i) z = exact(z);
            if (z == y) found.push_back(std::move(y));
            return;
        }
        const auto& bp = map.breakpoints();
        const double ilo = std::min(a * lo + b, a * hi + b);
        const double ihi = std::max(a * lo + b, a * hi + b);
        std::vector<double> cuts{lo};
        if (a != 0.0) {
            std::vector<double> ys;
            for (std::size_t k = 1; k + 1 < bp.size(); ++k)
                if (bp[k] > ilo && bp[k] < ihi) ys.push_back((bp[k] - b) / a);
            if (a < 0.0) std::reverse(ys.begin(), ys.end());
            for (double y : ys)
                if (y > cuts.back() && y < hi) cuts.push_back(y);
        }
        cuts.push_back(hi);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double mid = std::clamp(a * (0.5 * (cuts[c] + cuts[c + 1])) + b, 0.0, 1.0);
            const std::size_t k = map.segment_of(mid);
            const double s = map.slope(k);
            const Rational& S = exact.slope(k);
            descend(depth + 1, cuts[c], cuts[c + 1], s * a, s * (b - bp[k]) + map.values()[k], S * A,
                    S * (B - exact.breakpoint(k)) + exact.value(k));
        }
    }
};

}  // namespace

std::vector<PeriodicOrbit> periodic_orbits(const MapSpec& map, std::size_t max_period,
                                           std::size_t branch_cap) {
    if (max_period == 0) throw ParameterError("periodic_orbits: max_period must be >= 1");
    const ExactMap exact(map);
    std::vector<PeriodicOrbit> out;
    for (std::size_t p = 1; p <= max_period; ++p) {
        Search s{map, exact, p, branch_cap, 0, {}};
        s.descend(0, 0.0, 1.0, 1.0, 0.0, Rational(1), Rational(0));
        std::vector<Rational> mins;
        for (const auto& y : s.found) {
            std::vector<Rational> cyc{y};
            for (std::size_t i = 1; i < p; ++i) cyc.push_back(exact(cyc.back()));
            bool minimal = true;
            for (std::size_t i = 1; i < p && minimal; ++i)
                if (cyc[i] == y) minimal = false;
            if (!minimal) continue;
            const auto it = std::min_element(cyc.begin(), cyc.end());
            if (*it != y) continue;  // keep one representative per cycle
            if (std::find(mins.begin(), mins.end(), y) != mins.end()) continue;
            mins.push_back(y);
            PeriodicOrbit orb;
            orb.points = std::move(cyc);
            for (const auto& q : orb.points) orb.states.push_back(q.convert_to<double>());
            out.push_back(std::move(orb));
        }
        std::sort(out.end() - std::ptrdiff_t(mins.size()), out.end(),
                  [](const PeriodicOrbit& l, const PeriodicOrbit& r) { return l.points[0] < r.points[0]; });
    }
    return out;
}

}  // namespace shadowkit
