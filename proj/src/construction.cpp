#include "shadowkit/construction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "shadowkit/errors.hpp"
#include "shadowkit/intervals.hpp"

namespace shadowkit {

Fraction parse_xi(double xi) {
    for (Fraction f : {Fraction{1, 4}, Fraction{1, 3}, Fraction{1, 2}, Fraction{2, 3}, Fraction{3, 4}})
        if (std::abs(f.value() - xi) < 1e-9) return f;
    throw ParameterError("xi must be one of 1/4, 1/3, 1/2, 2/3, 3/4");
}

namespace {

double nearest_in(const IntervalSet& set, double y) {
    double best = set.front().lo;
    double bd = std::abs(best - y);
    for (const auto& iv : set) {
        const double c = std::clamp(y, iv.lo, iv.hi);
        if (std::abs(c - y) < bd) {
            best = c;
            bd = std::abs(c - y);
        }
    }
    return best;
}

std::optional<double> preimage_in(const MapSpec& map, double z, const IntervalSet& set) {
    const auto& bp = map.breakpoints();
    const auto& val = map.values();
    for (const auto& iv : set) {
        for (std::size_t k = 0; k < map.segment_count(); ++k) {
            const double lo = std::max(iv.lo, bp[k]);
            const double hi = std::min(iv.hi, bp[k + 1]);
            if (lo > hi) continue;
            const double s = map.slope(k);
            if (s == 0.0) {
                if (val[k] == z) return lo;
                continue;
            }
            const double x = bp[k] + (z - val[k]) / s;
            const double tol = 1e-12;
            if (x >= lo - tol && x <= hi + tol) return std::clamp(x, lo, hi);
        }
    }
    return std::nullopt;
}

IntervalSet inflate(const IntervalSet& set, double r) {
    IntervalSet out;
    for (const auto& iv : set) out.push_back({std::max(0.0, iv.lo - r), std::min(1.0, iv.hi + r)});
    return merge(std::move(out));
}

}  // namespace

std::optional<std::vector<double>> delta_chain(const MapSpec& map, double a, double b, double delta,
                                               std::optional<std::size_t> length, std::size_t max_length) {
    if (!(delta > 0.0)) throw ParameterError("delta_chain: delta must be positive");
    const double r = 0.5 * delta;  // margin keeps every gap strictly below delta
    const double ta = eval(map, a);
    const std::size_t limit = length ? *length : max_length;
    if (std::abs(ta - b) <= r && (!length || *length == 0)) return std::vector<double>{};
    if (length && *length == 0) return std::nullopt;

    std::vector<IntervalSet> reach{inflate({{ta, ta}}, r)};
    std::size_t m = 0;
    for (std::size_t t = 1; t <= limit; ++t) {
        const IntervalSet img = image(map, reach.back());
        const bool hit = std::abs(nearest_in(img, b) - b) <= r;
        if (hit && (!length || *length == t)) {
            m = t;
            break;
        }
        if (t == limit) return std::nullopt;
        reach.push_back(inflate(img, r));
    }
    std::vector<double> chain(m);
    double y = b;
    for (std::size_t t = m; t-- > 0;) {
        const double z = nearest_in(image(map, reach[t]), y);
        const auto c = preimage_in(map, z, reach[t]);
        if (!c) throw ResolutionError("delta_chain: lost a preimage while backtracking");
        chain[t] = *c;
        y = *c;
    }
    return chain;
}

namespace {

// Phase-shifted cycle read for n steps.
std::vector<double> cycle_run(const PeriodicOrbit& c, std::size_t phase, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = c.states[(phase + i) % c.period()];
    return out;
}

double cycle_distance(const PeriodicOrbit& c1, std::size_t r1, const PeriodicOrbit& c2, std::size_t r2) {
    const std::size_t n = std::lcm(c1.period(), c2.period());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        d = std::max(d, std::abs(c1.states[(r1 + i) % c1.period()] - c2.states[(r2 + i) % c2.period()]));
    return d;
}

double sum_phi(const Observable& phi, const std::vector<double>& xs) {
    long double s = 0.0L;
    for (double x : xs) s += phi(x);
    return double(s);
}

std::vector<double> fixed_length_chain(const MapSpec& map, double a, double b, double delta, std::size_t len,
                                       const char* what) {
    auto c = delta_chain(map, a, b, delta, len);
    if (!c)
        throw ConstructionImpossible(std::string("no delta-chain of length ") + std::to_string(len) +
                                     " for chain " + what);
    return *c;
}

std::size_t min_chain_length(const MapSpec& map, double a, double b, double delta, const char* what) {
    auto c = delta_chain(map, a, b, delta);
    if (!c) throw ConstructionImpossible(std::string("chain ") + what + ": target not delta-reachable");
    return c->size();
}

}  // namespace

BlockLibrary select_blocks(const MapSpec& map, const Observable& phi, const TransitionGraph& graph,
                           std::size_t class_id, const ConstructionParams& prm) {
    if (!(prm.eta > 0.0)) throw ParameterError("select_blocks: eta must be positive");
    const auto classes = chain_classes(graph);
    if (class_id >= classes.classes.size())
        throw ParameterError("select_blocks: class_id " + std::to_string(class_id) + " out of range (" +
                             std::to_string(classes.classes.size()) + " classes)");
    std::vector<char> in_class(graph.grid.cell_count, 0);
    for (auto c : classes.classes[class_id]) in_class[c] = 1;

    std::vector<PeriodicOrbit> cycles;
    for (auto& orb : periodic_orbits(map, prm.max_period)) {
        const bool inside = std::all_of(orb.states.begin(), orb.states.end(),
                                        [&](double x) { return in_class[graph.grid.cell_of(x)] != 0; });
        if (inside) cycles.push_back(std::move(orb));
    }
    if (cycles.size() < 2)
        throw ConstructionImpossible("class " + std::to_string(class_id) + " holds fewer than two periodic orbits of period <= " +
                                     std::to_string(prm.max_period));
    std::vector<double> avg;
    for (const auto& c : cycles) avg.push_back(c.average(phi));
    const auto [mn, mx] = std::minmax_element(avg.begin(), avg.end());
    if (*mx - *mn <= 1e-12)
        throw ConstructionImpossible("every periodic orbit in the class has the same average of " + phi.label());

    auto nearest = [&](double target) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < avg.size(); ++i)
            if (std::abs(avg[i] - target) < std::abs(avg[best] - target)) best = i;
        return best;
    };
    const std::size_t ia = prm.alpha_target ? nearest(*prm.alpha_target) : std::size_t(mn - avg.begin());
    const std::size_t ib = prm.beta_target ? nearest(*prm.beta_target) : std::size_t(mx - avg.begin());

    BlockLibrary lib;
    lib.cycles_considered = cycles.size();
    lib.alpha = avg[ia];
    lib.beta = avg[ib];
    lib.xi = prm.xi;
    lib.eta = prm.eta;
    const double xi = prm.xi.value();
    if (!(lib.beta > lib.alpha))
        throw ConstructionImpossible("the beta cycle average does not exceed the alpha cycle average");
    lib.zeta = xi * lib.alpha + (1.0 - xi) * lib.beta;
    if (!(8.0 * prm.eta < (1.0 - xi) * (lib.beta - lib.alpha))) {
        std::ostringstream os;
        os << "8 eta = " << 8.0 * prm.eta << " is not below (1 - xi)(beta - alpha) = "
           << (1.0 - xi) * (lib.beta - lib.alpha) << "; choose eta < " << (1.0 - xi) * (lib.beta - lib.alpha) / 8.0;
        throw ParameterError(os.str());
    }
    lib.alpha_cycle = cycles[ia];
    lib.beta_cycle = cycles[ib];

    const double lip = phi.lipschitz();
    if (prm.eps > 0.0) {
        if (lip * prm.eps > prm.eta / 4.0)
            throw ParameterError("select_blocks: Lip(phi) * eps exceeds eta / 4");
        lib.eps = prm.eps;
    } else {
        lib.eps = prm.eta / (8.0 * std::max(lip, 1e-300));
        lib.eps = std::min(lib.eps, 0.25);
    }
    if (prm.delta > 0.0) {
        lib.delta = prm.delta;
    } else {
        const auto mod = shadowing_modulus_report(map, lib.eps, prm.modulus_trials, prm.modulus_horizon, prm.seed);
        if (mod.delta_hat <= 0.0) throw ConstructionImpossible("shadowing modulus is zero: " + mod.diagnostic);
        lib.delta = mod.delta_hat / 2.0;
    }
    lib.M_bound = phi.sup_abs() + std::abs(lib.beta) + prm.eta;

    // alpha library: cycles with average within eta/8 of alpha, every phase, greedily separated
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < cycles.size(); ++i)
        if (std::abs(avg[i] - lib.alpha) <= prm.eta / 8.0) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        if (l == ia || r == ia) return l == ia && r != ia;
        return std::abs(avg[l] - lib.alpha) < std::abs(avg[r] - lib.alpha);
    });
    struct Phase {
        std::size_t cycle;
        std::size_t phase;
    };
    std::vector<Phase> phases;
    std::size_t period_lcm = 1;
    for (std::size_t i : order) {
        const std::size_t next_lcm = std::lcm(period_lcm, cycles[i].period());
        if (next_lcm > 840) continue;
        bool used = false;
        for (std::size_t r = 0; r < cycles[i].period() && phases.size() < prm.library_cap; ++r) {
            bool far = true;
            for (const auto& ph : phases)
                if (cycle_distance(cycles[ph.cycle], ph.phase, cycles[i], r) <= 4.0 * lib.eps) {
                    far = false;
                    break;
                }
            if (far) {
                phases.push_back({i, r});
                used = true;
            }
        }
        if (used) period_lcm = next_lcm;
        if (phases.size() >= prm.library_cap) break;
    }
    const std::size_t A = phases.size();
    const auto& beta_c = lib.beta_cycle;
    auto start_of = [&](std::size_t k) { return cycles[phases[k].cycle].states[phases[k].phase]; };
    auto end_of = [&](std::size_t k) {
        const auto& c = cycles[phases[k].cycle];
        return c.states[(phases[k].phase + c.period() - 1) % c.period()];
    };
    const double beta_start = beta_c.states.front();
    const double beta_end = beta_c.states.back();

    // chain lengths: maximum of the shortest chains, then rebuilt at exactly that length
    std::size_t Q = 0, W = 0, P = 0;
    for (std::size_t k = 0; k < A; ++k) {
        for (std::size_t k2 = 0; k2 < A; ++k2)
            Q = std::max(Q, min_chain_length(map, end_of(k), start_of(k2), lib.delta, "q"));
        W = std::max(W, min_chain_length(map, end_of(k), beta_start, lib.delta, "w"));
        P = std::max(P, min_chain_length(map, beta_end, start_of(k), lib.delta, "p"));
    }
    for (int attempt = 0;; ++attempt) {
        try {
            lib.q.assign(A, std::vector<std::vector<double>>(A));
            lib.w.assign(A, {});
            lib.p.assign(A, {});
            for (std::size_t k = 0; k < A; ++k) {
                for (std::size_t k2 = 0; k2 < A; ++k2)
                    lib.q[k][k2] = fixed_length_chain(map, end_of(k), start_of(k2), lib.delta, Q, "q");
                lib.w[k] = fixed_length_chain(map, end_of(k), beta_start, lib.delta, W, "w");
                lib.p[k] = fixed_length_chain(map, beta_end, start_of(k), lib.delta, P, "p");
            }
            break;
        } catch (const ConstructionImpossible&) {
            if (attempt >= 8) throw;
            ++Q, ++W, ++P;
        }
    }
    lib.Q = Q;
    lib.W = W;
    lib.P = P;

    // J: multiple of xi's denominator with xi J, (1 - xi) J fitting whole cycles
    const std::size_t num = std::size_t(prm.xi.num), den = std::size_t(prm.xi.den);
    const std::size_t m0 = std::lcm(period_lcm / std::gcd(period_lcm, num),
                                    beta_c.period() / std::gcd(beta_c.period(), den - num));
    const double J_floor = lib.M_bound * double(W + P) / prm.eta;
    std::size_t m = m0;
    while (double(den * m) <= J_floor) m += m0;
    lib.J = den * m;
    lib.K = lib.J + W;
    const std::size_t xiJ = num * m;
    const std::size_t restJ = (den - num) * m;

    for (std::size_t k = 0; k < A; ++k) {
        auto g = cycle_run(cycles[phases[k].cycle], phases[k].phase, xiJ);
        g.insert(g.end(), lib.w[k].begin(), lib.w[k].end());
        const auto tail = cycle_run(beta_c, 0, restJ);
        g.insert(g.end(), tail.begin(), tail.end());
        const double ga = sum_phi(phi, g) / double(g.size());
        if (!(std::abs(ga - lib.zeta) < 2.0 * prm.eta))
            throw ConstructionImpossible("gamma block average " + std::to_string(ga) + " is not within 2 eta of zeta");
        lib.gamma_blocks.push_back(std::move(g));
    }

    const auto L_bound = std::size_t(std::ceil(lib.M_bound * double(Q) / prm.eta));
    const std::size_t L_min = std::max({prm.L_target, L_bound, std::size_t(1)});
    const std::size_t KP = lib.K + P;
    if (KP >= Q + L_min && (KP - Q) % period_lcm == 0)
        lib.L = KP - Q;
    else
        lib.L = ((L_min + period_lcm - 1) / period_lcm) * period_lcm;
    for (std::size_t k = 0; k < A; ++k) {
        auto b = cycle_run(cycles[phases[k].cycle], phases[k].phase, lib.L);
        if (!(std::abs(sum_phi(phi, b) / double(lib.L) - lib.alpha) <= prm.eta / 4.0))
            throw ConstructionImpossible("alpha block average is not within eta/4 of alpha");
        lib.alpha_blocks.push_back(std::move(b));
    }
    return lib;
}

Schedule plan_schedule(std::size_t L, std::size_t Q, std::size_t K, std::size_t P, double eta, double M_bound,
                       std::size_t n_steps) {
    if (L == 0 || K == 0) throw ParameterError("plan_schedule: L and K must be >= 1");
    if (!(eta > 0.0 && eta < M_bound)) throw ParameterError("plan_schedule: eta must lie in (0, M_bound)");
    if (n_steps == 0) throw ParameterError("plan_schedule: n_steps must be >= 1");
    Schedule s;
    s.L = L, s.Q = Q, s.K = K, s.P = P;
    s.eta = eta;
    s.M_bound = M_bound;
    s.n_steps = n_steps;
    const std::uint64_t c1 = L + Q, c2 = K + P;
    const std::uint64_t common = std::lcm(c1, c2);
    s.lambda_ = common / c1;
    s.kappa_ = common / c2;
    const std::uint64_t unit1 = s.lambda_ * c1, unit2 = s.kappa_ * c2;

    using Big = boost::multiprecision::mpz_int;
    const Rational r_eta(eta);
    const Rational r_gap = Rational(M_bound) - r_eta;
    const Big limit = Big(std::numeric_limits<std::uint64_t>::max());

    // minimal l > prev with l * unit * eta > (M - eta) * base
    auto minimal = [&](std::uint64_t prev, const Big& base, std::uint64_t unit) -> Big {
        const Rational need = r_gap * Rational(base) / (r_eta * Rational(Big(unit)));
        Big l = boost::multiprecision::numerator(need) / boost::multiprecision::denominator(need);
        while (Rational(l) <= need) ++l;
        return std::max<Big>(l, Big(prev) + 1);
    };
    auto fail = [&](std::size_t n) {
        throw ScheduleError(n - 1, "plan_schedule: 64-bit overflow at n = " + std::to_string(n) +
                                        "; max feasible n = " + std::to_string(n - 1));
    };
    Big a = 0;
    std::uint64_t lp = 0, lpp = 0;
    for (std::size_t n = 1; n <= n_steps; ++n) {
        const Big l = minimal(lp, a, unit1);
        const Big M = l * unit1;
        const Big b = a + M;
        if (M > limit || b > limit) fail(n);
        const Big l2 = minimal(lpp, b, unit2);
        const Big M2 = l2 * unit2;
        const Big next = b + M2;
        if (M2 > limit || next > limit) fail(n);
        lp = l.convert_to<std::uint64_t>();
        lpp = l2.convert_to<std::uint64_t>();
        s.l_n.push_back(lp);
        s.l_n_prime.push_back(lpp);
        s.a_n.push_back(a.convert_to<std::uint64_t>());
        s.M_n.push_back(M.convert_to<std::uint64_t>());
        s.b_n.push_back(b.convert_to<std::uint64_t>());
        s.M_n_prime.push_back(M2.convert_to<std::uint64_t>());
        a = next;
    }
    s.end = a.convert_to<std::uint64_t>();
    return s;
}

namespace {

struct Chooser {
    std::vector<std::size_t> perm;
    std::uint64_t seed;

    Chooser(std::size_t A, std::uint64_t s) : perm(A), seed(s) {
        std::iota(perm.begin(), perm.end(), std::size_t(0));
        std::mt19937_64 rng(derive_seed(s, 0xb10c));
        std::shuffle(perm.begin(), perm.end(), rng);
    }
    std::size_t offset(std::size_t n, bool gamma) const {
        return std::size_t(derive_seed(seed, 2 * n + (gamma ? 1 : 0)) % perm.size());
    }
    std::size_t block(std::size_t n, bool gamma, std::uint64_t j) const {
        return perm[(offset(n, gamma) + j) % perm.size()];
    }
};

void check_library(const BlockLibrary& lib, const Schedule& s) {
    if (lib.alpha_blocks.empty() || lib.alpha_blocks.size() != lib.gamma_blocks.size())
        throw ParameterError("library: alpha and gamma block counts differ or are zero");
    if (lib.L != s.L || lib.Q != s.Q || lib.K != s.K || lib.P != s.P)
        throw ParameterError("library/schedule length mismatch");
    for (const auto& b : lib.alpha_blocks)
        if (b.size() != s.L) throw ParameterError("library: alpha block length differs from L");
    for (const auto& g : lib.gamma_blocks)
        if (g.size() != s.K) throw ParameterError("library: gamma block length differs from K");
}

std::uint64_t unit_count(const Schedule& s, std::size_t n, bool gamma) {
    return gamma ? s.l_n_prime[n - 1] * s.kappa_ : s.l_n[n - 1] * s.lambda_;
}

// Visits the units of the pseudo-orbit in order: (n, gamma, block, next block).
template <class F>
void for_each_unit(const BlockLibrary& lib, const Schedule& s, const Chooser& ch, std::size_t n_max,
                   std::uint64_t max_units, F&& f) {
    std::uint64_t seen = 0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        for (bool gamma : {false, true}) {
            const std::uint64_t c = unit_count(s, n, gamma);
            for (std::uint64_t j = 0; j < c; ++j) {
                if (seen++ >= max_units) return;
                const std::size_t k = ch.block(n, gamma, j);
                const std::size_t next = j + 1 < c ? ch.block(n, gamma, j + 1)
                                                   : (gamma ? ch.block(n + 1, false, 0) : ch.block(n, true, 0));
                if (!f(n, gamma, k, next)) return;
            }
        }
    }
    (void)lib;
}

}  // namespace

std::size_t unit_block(const BlockLibrary& lib, std::uint64_t seed, std::size_t n, bool gamma, std::uint64_t j) {
    return Chooser(lib.alpha_blocks.size(), seed).block(n, gamma, j);
}

PseudoOrbit build_pseudo_orbit(const BlockLibrary& lib, const Schedule& sched, std::size_t horizon,
                               std::uint64_t seed) {
    check_library(lib, sched);
    if (horizon > sched.end)
        throw ParameterError("build_pseudo_orbit: horizon exceeds a_{n_steps+1} = " + std::to_string(sched.end));
    const Chooser ch(lib.alpha_blocks.size(), seed);
    PseudoOrbit po{{}, lib.delta, "construction-star"};
    po.states.reserve(horizon);
    for_each_unit(lib, sched, ch, sched.n_steps, std::uint64_t(-1),
                  [&](std::size_t, bool gamma, std::size_t k, std::size_t next) {
                      const auto& block = gamma ? lib.gamma_blocks[k] : lib.alpha_blocks[k];
                      const auto& chain = gamma ? lib.p[next] : lib.q[k][next];
                      for (double x : block) {
                          if (po.states.size() == horizon) return false;
                          po.states.push_back(x);
                      }
                      for (double x : chain) {
                          if (po.states.size() == horizon) return false;
                          po.states.push_back(x);
                      }
                      return po.states.size() < horizon;
                  });
    return po;
}

namespace {

// Sum over one segment of c units with closed-form repetition of the permutation cycle.
long double segment_sum(const Chooser& ch, std::size_t n, bool gamma, std::uint64_t c, std::size_t k_after,
                        const std::vector<std::vector<long double>>& S) {
    const std::size_t A = ch.perm.size();
    const std::size_t o = ch.offset(n, gamma);
    auto at = [&](std::uint64_t j) { return ch.perm[(o + j) % A]; };
    long double cyc = 0.0L;
    for (std::size_t i = 0; i < A; ++i) cyc += S[at(i)][at(i + 1)];
    const std::uint64_t regular = c - 1;
    const std::uint64_t full = regular / A;
    const std::uint64_t rem = regular % A;
    long double total = (long double)full * cyc;
    for (std::uint64_t j = 0; j < rem; ++j) total += S[at(j)][at(j + 1)];
    total += S[at(c - 1)][k_after];
    return total;
}

}  // namespace

IrregularReport verify_irregular(const MapSpec& map, const Observable& phi, const Schedule& sched,
                                 const BlockLibrary& lib, std::size_t n_check, std::uint64_t seed,
                                 std::size_t horizon) {
    check_library(lib, sched);
    if (n_check == 0 || n_check > sched.n_steps)
        throw ParameterError("verify_irregular: n_check must be in [1, n_steps]");
    const std::size_t A = lib.alpha_blocks.size();
    const Chooser ch(A, seed);
    IrregularReport rep;
    rep.slack = phi.lipschitz() * lib.eps;
    rep.required_gap = lib.zeta - lib.alpha - 8.0 * lib.eta - 2.0 * rep.slack;

    // certify tracing up to a_{n_check+1}: forward refinement, skipping repeated permutation cycles
    {
        ForwardTracer tracer(map, lib.eps);
        auto feed_unit = [&](bool gamma, std::size_t k, std::size_t next) {
            const auto& block = gamma ? lib.gamma_blocks[k] : lib.alpha_blocks[k];
            const auto& chain = gamma ? lib.p[next] : lib.q[k][next];
            for (double x : block) tracer.feed(x);
            for (double x : chain) tracer.feed(x);
            ++rep.traced_units;
            if (rep.traced_units > 200000)
                throw ResolutionError("verify_irregular: tracer did not settle on repeated blocks");
        };
        for (std::size_t n = 1; n <= n_check; ++n) {
            for (bool gamma : {false, true}) {
                const std::uint64_t c = unit_count(sched, n, gamma);
                std::optional<IntervalSet> cycle_start;
                std::uint64_t j = 0;
                while (j + 1 < c) {
                    if (j % A == 0) {
                        if (cycle_start && *cycle_start == tracer.current()) {
                            const std::uint64_t cycles = (c - 1 - j) / A;
                            j += cycles * A;
                            rep.skipped_units += cycles * A;
                            cycle_start.reset();
                            if (j + 1 >= c) break;
                        } else {
                            cycle_start = tracer.current();
                        }
                    }
                    feed_unit(gamma, ch.block(n, gamma, j), ch.block(n, gamma, j + 1));
                    ++j;
                }
                const std::size_t after = gamma ? ch.block(n + 1, false, 0) : ch.block(n, true, 0);
                feed_unit(gamma, ch.block(n, gamma, c - 1), after);
            }
        }
        rep.traced = true;
    }

    // closed-form Birkhoff sums of Z at the checkpoints
    std::vector<std::vector<long double>> S1(A, std::vector<long double>(A)), S2(A, std::vector<long double>(A));
    auto sum = [&](const std::vector<double>& xs) {
        long double s = 0.0L;
        for (double x : xs) s += phi(x);
        return s;
    };
    for (std::size_t k = 0; k < A; ++k) {
        const long double sa = sum(lib.alpha_blocks[k]);
        const long double sg = sum(lib.gamma_blocks[k]);
        for (std::size_t k2 = 0; k2 < A; ++k2) {
            S1[k][k2] = sa + sum(lib.q[k][k2]);
            S2[k][k2] = sg + sum(lib.p[k2]);
        }
    }

    // exact shadow of the materialized prefix
    const auto H = std::size_t(std::min<std::uint64_t>(horizon, sched.end));
    const auto prefix = build_pseudo_orbit(lib, sched, H, seed);
    const auto tr = trace(map, prefix, lib.eps);
    rep.materialized_horizon = prefix.states.size();
    rep.shadow_point = tr.exact_shadow_point;
    rep.shadow_error = tr.achieved_error;
    std::vector<long double> u_sums{0.0L};  // u_sums[N] = sum_{i<N} phi(T^i u)
    {
        const ExactMap exact(map);
        Rational x = *tr.exact_shadow_point;
        for (std::size_t i = 0; i < prefix.states.size(); ++i) {
            if (i > 0) x = exact(x);
            u_sums.push_back(u_sums.back() + phi(x.convert_to<double>()));
        }
    }

    long double total = 0.0L;
    double best_hi = -INFINITY, best_lo = INFINITY;
    for (std::size_t n = 1; n <= n_check; ++n) {
        Checkpoint cp;
        cp.n = n;
        const std::uint64_t c1 = unit_count(sched, n, false), c2 = unit_count(sched, n, true);
        total += segment_sum(ch, n, false, c1, ch.block(n, true, 0), S1);
        cp.b_n = sched.b_n[n - 1];
        cp.A_b_Z = double(total / (long double)cp.b_n);
        total += segment_sum(ch, n, true, c2, ch.block(n + 1, false, 0), S2);
        cp.a_next = n < sched.n_steps ? sched.a_n[n] : sched.end;
        cp.A_a_Z = double(total / (long double)cp.a_next);
        if (cp.b_n < u_sums.size()) cp.A_b_u = double(u_sums[cp.b_n] / (long double)cp.b_n);
        if (cp.a_next < u_sums.size()) cp.A_a_u = double(u_sums[cp.a_next] / (long double)cp.a_next);
        const double tol = 4.0 * lib.eta;
        cp.liminf_ok = std::abs(cp.A_b_Z - lib.alpha) <= tol &&
                       (!cp.A_b_u || std::abs(*cp.A_b_u - lib.alpha) <= tol + rep.slack);
        cp.limsup_ok = std::abs(cp.A_a_Z - lib.zeta) <= tol &&
                       (!cp.A_a_u || std::abs(*cp.A_a_u - lib.zeta) <= tol + rep.slack);
        best_hi = std::max(best_hi, cp.A_a_Z - rep.slack);
        best_lo = std::min(best_lo, cp.A_b_Z + rep.slack);
        rep.checkpoints.push_back(cp);
    }
    rep.gap = best_hi - best_lo;
    const bool bounds = std::all_of(rep.checkpoints.begin(), rep.checkpoints.end(),
                                    [](const Checkpoint& c) { return c.liminf_ok && c.limsup_ok; });
    rep.irregular = rep.traced && bounds && rep.required_gap > 0.0;
    return rep;
}

std::string schedule_json(const Schedule& s) {
    nlohmann::json j;
    j["L"] = s.L;
    j["Q"] = s.Q;
    j["K"] = s.K;
    j["P"] = s.P;
    j["lambda"] = s.lambda_;
    j["kappa"] = s.kappa_;
    j["eta"] = s.eta;
    j["M_bound"] = s.M_bound;
    j["n_steps"] = s.n_steps;
    j["l_n"] = s.l_n;
    j["l_n_prime"] = s.l_n_prime;
    j["a_n"] = s.a_n;
    j["b_n"] = s.b_n;
    j["M_n"] = s.M_n;
    j["M_n_prime"] = s.M_n_prime;
    j["a_end"] = s.end;
    return j.dump(2);
}

}  // namespace shadowkit
