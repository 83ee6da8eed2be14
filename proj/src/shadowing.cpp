#include "shadowkit/shadowing.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "shadowkit/errors.hpp"
#include "shadowkit/parallel.hpp"

namespace shadowkit {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 over the pair
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double max_gap(const MapSpec& map, std::span<const double> states) {
    double g = 0.0;
    for (std::size_t i = 0; i + 1 < states.size(); ++i)
        g = std::max(g, std::abs(eval(map, states[i]) - states[i + 1]));
    return g;
}

bool is_pseudo_orbit(const MapSpec& map, std::span<const double> states, double delta) {
    for (std::size_t i = 0; i + 1 < states.size(); ++i)
        if (!(std::abs(eval(map, states[i]) - states[i + 1]) < delta)) return false;
    return true;
}

PseudoOrbit make_pseudo_orbit(const MapSpec& map, std::vector<double> states, double delta,
                              std::string provenance) {
    if (!(delta > 0.0)) throw ParameterError("pseudo-orbit: delta must be positive");
    if (!is_pseudo_orbit(map, states, delta))
        throw ParameterError("pseudo-orbit: a gap is >= delta on " + map.label());
    return {std::move(states), delta, std::move(provenance)};
}

PseudoOrbit perturbed_orbit(const MapSpec& map, double x0, std::size_t n, double delta,
                            std::uint64_t seed) {
    if (!(delta > 0.0)) throw ParameterError("perturbed_orbit: delta must be positive");
    if (n == 0) throw ParameterError("perturbed_orbit: n must be >= 1");
    if (!(x0 >= 0.0 && x0 <= 1.0)) throw DomainError("perturbed_orbit: x0 outside [0,1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    PseudoOrbit po{{}, delta, "random-perturbed"};
    po.states.reserve(n);
    po.states.push_back(x0);
    for (std::size_t i = 1; i < n; ++i)
        po.states.push_back(std::clamp(eval(map, po.states.back()) + delta * u(rng), 0.0, 1.0));
    return po;
}

ForwardTracer::ForwardTracer(const MapSpec& map, double eps, std::size_t cap)
    : map_(&map), eps_(eps), cap_(cap) {
    if (!(eps > 0.0)) throw ParameterError("trace: eps must be positive");
}

void ForwardTracer::reset(IntervalSet set, std::size_t consumed) {
    set_ = std::move(set);
    consumed_ = consumed;
}

void ForwardTracer::feed(double state) {
    const Interval window{std::max(0.0, state - eps_), std::min(1.0, state + eps_)};
    if (consumed_ == 0)
        set_ = window.lo <= window.hi ? IntervalSet{window} : IntervalSet{};
    else
        set_ = intersect(image(*map_, set_), window);
    if (set_.empty()) throw NotShadowed(consumed_, "no orbit eps-traces the pseudo-orbit up to index " +
                                                       std::to_string(consumed_));
    if (set_.size() > cap_)
        throw ResolutionError("trace: surviving set exceeds " + std::to_string(cap_) + " intervals");
    ++consumed_;
}

namespace {

// Preimage of z in the segment closest to `near`, preferring points inside `set`.
Rational pull_back(const ExactMap& map, const Rational& z, const IntervalSet& set, double centre) {
    std::optional<Rational> best;
    double best_key = 0.0;
    for (std::size_t k = 0; k < map.segment_count(); ++k) {
        const Rational& s = map.slope(k);
        if (s == 0) continue;
        const Rational& v0 = map.value(k);
        const Rational& v1 = map.value(k + 1);
        if ((z < v0 && z < v1) || (z > v0 && z > v1)) continue;
        Rational x = map.breakpoint(k) + (z - v0) / s;
        const double xd = x.convert_to<double>();
        const double outside = distance_to(set, xd);
        // points inside the surviving set win; ties go to the one nearest the window centre
        const double key = outside > 0.0 ? 2.0 + outside : std::abs(xd - centre);
        if (!best || key < best_key) {
            best = std::move(x);
            best_key = key;
        }
    }
    if (!best) throw ResolutionError("trace: no preimage found during backward pass");
    return *best;
}

}  // namespace

double exact_trace_error(const ExactMap& map, const Rational& y, std::span<const double> states) {
    Rational x = y;
    double err = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (i > 0) x = map(x);
        Rational d = x - Rational(states[i]);
        err = std::max(err, std::abs(d.convert_to<double>()));
    }
    return err;
}

TraceResult trace(const MapSpec& map, std::span<const double> states, double eps) {
    if (states.empty()) throw ParameterError("trace: empty pseudo-orbit");
    ForwardTracer fwd(map, eps);
    std::vector<IntervalSet> sets;
    sets.reserve(states.size());
    for (double s : states) {
        fwd.feed(s);
        sets.push_back(fwd.current());
    }
    const Interval* w = widest(sets.back());
    TraceResult out;
    out.surviving_interval_width = w->width();

    const ExactMap exact(map);
    Rational z = (Rational(w->lo) + Rational(w->hi)) / 2;
    for (std::size_t i = states.size() - 1; i-- > 0;) z = pull_back(exact, z, sets[i], states[i]);
    out.achieved_error = exact_trace_error(exact, z, states);
    out.shadow_point = z.convert_to<double>();
    out.exact_shadow_point = std::move(z);
    return out;
}

TraceResult trace(const MapSpec& map, const PseudoOrbit& po, double eps) {
    return trace(map, std::span<const double>(po.states), eps);
}

bool traceable(const MapSpec& map, std::span<const double> states, double eps) {
    ForwardTracer fwd(map, eps);
    try {
        for (double s : states) fwd.feed(s);
    } catch (const NotShadowed&) {
        return false;
    }
    return true;
}

namespace {

struct Trial {
    double x0;
    std::vector<double> noise;
};

bool all_traced(const MapSpec& map, const std::vector<Trial>& trials, double delta, double eps) {
    std::vector<char> ok(trials.size(), 0);
    parallel_for(trials.size(), [&](std::size_t t) {
        std::vector<double> s;
        s.reserve(trials[t].noise.size() + 1);
        s.push_back(trials[t].x0);
        for (double v : trials[t].noise)
            s.push_back(std::clamp(eval(map, s.back()) + delta * v, 0.0, 1.0));
        ok[t] = traceable(map, s, eps) ? 1 : 0;
    });
    return std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
}

}  // namespace

ModulusResult shadowing_modulus_report(const MapSpec& map, double eps, std::size_t trials,
                                       std::size_t horizon, std::uint64_t seed) {
    if (!(eps > 0.0)) throw ParameterError("shadowing_modulus: eps must be positive");
    if (trials == 0) throw ParameterError("shadowing_modulus: trials must be >= 1");
    if (horizon < 2) throw ParameterError("shadowing_modulus: horizon must be >= 2");

    std::vector<Trial> pool(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        std::mt19937_64 rng(derive_seed(seed, t));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        pool[t].x0 = u(rng);
        pool[t].noise.resize(horizon - 1);
        for (auto& v : pool[t].noise) v = u(rng) - 0.5;
    }

    double good = eps;
    int halvings = 0;
    while (!all_traced(map, pool, good, eps)) {
        if (++halvings > 40)
            return {0.0, "no delta down to eps*2^-40 traced all " + std::to_string(trials) + " trials"};
        good /= 2.0;
    }
    double bad = 2.0 * good;
    while (bad <= 1.0 && all_traced(map, pool, bad, eps)) {
        good = bad;
        bad *= 2.0;
    }
    while ((bad - good) > good * std::ldexp(1.0, -10)) {
        const double mid = 0.5 * (good + bad);
        if (all_traced(map, pool, mid, eps))
            good = mid;
        else
            bad = mid;
    }
    return {good, ""};
}

double shadowing_modulus(const MapSpec& map, double eps, std::size_t trials, std::size_t horizon,
                         std::uint64_t seed) {
    return shadowing_modulus_report(map, eps, trials, horizon, seed).delta_hat;
}

std::string to_csv(const PseudoOrbit& po) {
    std::ostringstream os;
    os.precision(17);
    os << "# delta=" << po.delta << ",provenance=" << po.provenance << "\n";
    for (double s : po.states) os << s << "\n";
    return os.str();
}

PseudoOrbit pseudo_orbit_from_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    PseudoOrbit po;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (!header) {
            const auto d = line.find("delta=");
            const auto p = line.find(",provenance=");
            if (line[0] != '#' || d == std::string::npos || p == std::string::npos)
                throw FormatError(source + ":" + std::to_string(lineno) +
                                  ": expected header '# delta=...,provenance=...'");
            try {
                po.delta = std::stod(line.substr(d + 6, p - d - 6));
            } catch (const std::exception&) {
                throw FormatError(source + ":" + std::to_string(lineno) + ": bad delta");
            }
            po.provenance = line.substr(p + 12);
            header = true;
            continue;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(line, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || !(v >= 0.0 && v <= 1.0))
            throw FormatError(source + ":" + std::to_string(lineno) + ": state '" + line +
                              "' is not a number in [0,1]");
        po.states.push_back(v);
    }
    if (!header) throw FormatError(source + ":1: missing header");
    return po;
}

std::string to_json(const TraceResult& r) {
    nlohmann::json j;
    j["shadow_point"] = r.shadow_point ? nlohmann::json(*r.shadow_point) : nlohmann::json(nullptr);
    j["exact_shadow_point"] =
        r.exact_shadow_point ? nlohmann::json(r.exact_shadow_point->str()) : nlohmann::json(nullptr);
    j["achieved_error"] = r.achieved_error;
    j["surviving_interval_width"] = r.surviving_interval_width;
    return j.dump(2);
}

bool is_shift_pseudo_orbit(const ShiftSystem& sys, const std::vector<ShiftSystem::Word>& po,
                           double delta) {
    for (std::size_t j = 0; j + 1 < po.size(); ++j)
        if (!(sys.distance(ShiftSystem::shift(po[j]), po[j + 1]) < delta)) return false;
    return true;
}

std::vector<ShiftSystem::Word> shift_pseudo_orbit(const ShiftSystem& sys, std::size_t n,
                                                  std::size_t word_length, std::size_t m,
                                                  std::uint64_t seed) {
    if (word_length < m + 2) throw ParameterError("shift_pseudo_orbit: words shorter than m + 2");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> sym(0, sys.alphabet_size - 1);
    std::vector<ShiftSystem::Word> po;
    ShiftSystem::Word w(word_length);
    for (auto& s : w) s = sym(rng);
    po.push_back(w);
    for (std::size_t j = 1; j < n; ++j) {
        ShiftSystem::Word next(word_length);
        for (std::size_t i = 0; i < word_length; ++i) next[i] = i <= m ? po.back()[i + 1] : sym(rng);
        po.push_back(std::move(next));
    }
    return po;
}

ShiftSystem::Word trace_shift(const std::vector<ShiftSystem::Word>& po) {
    ShiftSystem::Word y;
    if (po.empty()) return y;
    for (const auto& w : po) y.push_back(w.at(0));
    y.insert(y.end(), po.back().begin() + 1, po.back().end());
    return y;
}

double shift_trace_error(const ShiftSystem& sys, const ShiftSystem::Word& y,
                         const std::vector<ShiftSystem::Word>& po) {
    double err = 0.0;
    ShiftSystem::Word cur = y;
    for (const auto& w : po) {
        err = std::max(err, sys.distance(cur, w));
        cur = ShiftSystem::shift(cur);
    }
    return err;
}

}  // namespace shadowkit
