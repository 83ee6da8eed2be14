#include "shadowkit/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "shadowkit/birkhoff.hpp"
#include "shadowkit/chain.hpp"
#include "shadowkit/construction.hpp"
#include "shadowkit/entropy.hpp"
#include "shadowkit/errors.hpp"
#include "shadowkit/level_sets.hpp"
#include "shadowkit/map.hpp"
#include "shadowkit/observable.hpp"
#include "shadowkit/parallel.hpp"
#include "shadowkit/shadowing.hpp"

namespace shadowkit::cli {

using nlohmann::json;

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"classes", "trace",    "modulus",      "entropy", "irregular",
                                                "levelset", "rate",    "perturb-demo", "validate"};
    return names;
}

namespace {

// non-finite doubles become strings so the JSON stays valid
json num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

class Reader {
public:
    Reader(const json& raw, std::vector<std::string>& errs) : raw_(raw), errs_(errs) {}

    // value at section.key (section empty = top level), default when absent
    template <class T>
    T get(const std::string& section, const std::string& key, T def) {
        const std::string field = section.empty() ? key : section + "." + key;
        const json* sec = &raw_;
        if (!section.empty()) {
            if (!raw_.contains(section)) return store(section, key, def);
            sec = &raw_.at(section);
            if (!sec->is_object()) {
                errs_.push_back(section + ": must be an object");
                return store(section, key, def);
            }
        }
        if (!sec->contains(key) || sec->at(key).is_null()) return store(section, key, def);
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!sec->at(key).is_number()) throw std::invalid_argument("");
            } else if constexpr (std::is_integral_v<T>) {
                const auto& v = sec->at(key);
                if (!v.is_number_integer() && !v.is_number_unsigned()) throw std::invalid_argument("");
                if (v.is_number_integer() && v.get<long long>() < 0) {
                    errs_.push_back(field + ": must be a non-negative integer");
                    return store(section, key, def);
                }
            }
            return store(section, key, sec->at(key).get<T>());
        } catch (const std::exception&) {
            errs_.push_back(field + ": wrong type");
            return store(section, key, def);
        }
    }

    std::optional<double> maybe(const std::string& section, const std::string& key) {
        if (!raw_.contains(section) || !raw_.at(section).is_object()) return std::nullopt;
        const auto& sec = raw_.at(section);
        if (!sec.contains(key) || sec.at(key).is_null()) {
            out_[section][key] = nullptr;
            return std::nullopt;
        }
        if (!sec.at(key).is_number()) {
            errs_.push_back(section + "." + key + ": wrong type");
            return std::nullopt;
        }
        const double v = sec.at(key).get<double>();
        out_[section][key] = v;
        return v;
    }

    void check(bool ok, const std::string& field, const std::string& message) {
        if (!ok) errs_.push_back(field + ": " + message);
    }

    json& out() { return out_; }

private:
    template <class T>
    T store(const std::string& section, const std::string& key, T v) {
        if (section.empty())
            out_[key] = v;
        else
            out_[section][key] = v;
        return v;
    }

    const json& raw_;
    std::vector<std::string>& errs_;
    json out_ = json::object();
};

MapSpec build_map(const json& spec) {
    if (spec.contains("file")) return load_map_file(spec.at("file").get<std::string>());
    const std::string builder = spec.value("builder", "tent");
    if (builder == "tent") return tent(spec.value("slope", 2.0));
    if (builder == "exv") {
        const auto depth = spec.value("depth", std::size_t(2));
        if (spec.contains("slopes")) {
            const auto slopes = spec.at("slopes").get<std::vector<double>>();
            return example_exv(depth, slopes);
        }
        return example_exv(depth);
    }
    if (builder == "linear") return linear_map(spec.value("factor", 0.5));
    if (builder == "identity") return identity_map();
    throw ParameterError("unknown builder '" + builder + "' (tent, exv, linear, identity, or a file)");
}

Observable build_observable(const json& spec) {
    const std::string kind = spec.value("kind", "coordinate");
    if (kind == "coordinate") return Observable::coordinate();
    if (kind == "cosine") return Observable::cosine(spec.value("k", 1));
    if (kind == "constant") return Observable::constant(spec.value("value", 0.5));
    if (kind == "piecewise_linear")
        return Observable::piecewise_linear(spec.at("breakpoints").get<std::vector<double>>(),
                                            spec.at("values").get<std::vector<double>>());
    throw ParameterError("unknown kind '" + kind + "' (coordinate, cosine, constant, piecewise_linear)");
}

json default_map() { return {{"builder", "tent"}, {"slope", 2.0}}; }

void resolve_section(Reader& r, const std::string& sub, const MapSpec* map) {
    const double lip = map ? lipschitz_constant(*map) : 2.0;
    if (sub == "classes") {
        const double h = r.get("classes", "h", 1.0 / 4096);
        r.check(h > 0 && h <= 0.5, "classes.h", "must be in (0, 0.5]");
        const double d = r.get("classes", "delta", 2 * h);
        r.check(d >= h, "classes.delta", "must be >= h (build_transition_graph precondition)");
    } else if (sub == "trace") {
        const double d = r.get("trace", "delta", 1e-4);
        const double e = r.get("trace", "eps", 1e-3);
        r.check(d >= 0, "trace.delta", "must be >= 0");
        r.check(e > 0, "trace.eps", "must be positive");
        r.check(r.get("trace", "horizon", std::size_t(500)) >= 1, "trace.horizon", "must be >= 1");
        r.check(r.get("trace", "trials", std::size_t(100)) >= 1, "trace.trials", "must be >= 1");
    } else if (sub == "modulus") {
        r.check(r.get("modulus", "eps", 0.01) > 0, "modulus.eps", "must be positive");
        r.check(r.get("modulus", "trials", std::size_t(20)) >= 1, "modulus.trials", "must be >= 1");
        r.check(r.get("modulus", "horizon", std::size_t(300)) >= 2, "modulus.horizon", "must be >= 2");
    } else if (sub == "entropy") {
        const auto nmax = r.get("entropy", "lap_n_max", std::size_t(20));
        r.check(nmax >= 2 && nmax <= 40, "entropy.lap_n_max", "must be in [2, 40]");
        const auto pl = r.get("entropy", "pool_log2", std::size_t(14));
        r.check(pl >= 4 && pl <= 20, "entropy.pool_log2", "must be in [4, 20]");
        r.check(r.get("entropy", "eps", 0.02) > 0, "entropy.eps", "must be positive");
        const auto lo = r.get("entropy", "n_lo", std::size_t(6));
        const auto hi = r.get("entropy", "n_hi", std::size_t(12));
        r.check(lo >= 1 && lo + 1 <= hi, "entropy.n_lo", "need 1 <= n_lo < n_hi");
        r.get("entropy", "spanning", true);
        r.check(r.get("entropy", "katok_sample", std::size_t(2000)) >= 10, "entropy.katok_sample", "must be >= 10");
        r.check(r.get("entropy", "katok_eps", 0.05) > 0, "entropy.katok_eps", "must be positive");
        const auto klo = r.get("entropy", "katok_n_lo", std::size_t(2));
        const auto khi = r.get("entropy", "katok_n_hi", std::size_t(8));
        r.check(klo >= 1 && klo + 1 <= khi, "entropy.katok_n_lo", "need 1 <= katok_n_lo < katok_n_hi");
    } else if (sub == "irregular" || sub == "perturb-demo") {
        const std::string s = sub;
        const double h = r.get(s, "h", 1.0 / 4096);
        r.check(h > 0 && h <= 0.5, s + ".h", "must be in (0, 0.5]");
        r.check(r.get(s, "graph_delta", 2 * h) >= h, s + ".graph_delta",
                "must be >= h (build_transition_graph precondition)");
        r.get(s, "class_id", std::size_t(0));
        const double xi = r.get(s, "xi", 0.5);
        try {
            parse_xi(xi);
        } catch (const ParameterError& e) {
            r.check(false, s + ".xi", e.what());
        }
        r.check(r.get(s, "eta", 0.01) > 0, s + ".eta", "must be positive");
        const auto mp = r.get(s, "max_period", std::size_t(8));
        r.check(mp >= 1 && mp <= 14, s + ".max_period", "must be in [1, 14]");
        const auto steps = r.get(s, "n_steps", std::size_t(3));
        const auto check = r.get(s, "n_check", std::size_t(3));
        r.check(steps >= 1, s + ".n_steps", "must be >= 1");
        r.check(check >= 1 && check <= steps, s + ".n_check", "must be in [1, n_steps]");
        r.check(r.get(s, "horizon", std::size_t(4096)) >= 1, s + ".horizon", "must be >= 1");
        if (sub == "irregular") {
            r.maybe(s, "alpha_target");
            r.maybe(s, "beta_target");
        } else {
            const auto ks = r.get(s, "ks", std::vector<std::size_t>{1, 2, 4});
            r.check(!ks.empty() && std::find(ks.begin(), ks.end(), 0) == ks.end(), s + ".ks",
                    "must be a non-empty list of positive integers");
        }
    } else if (sub == "levelset") {
        r.get("levelset", "c", 0.6);
        const auto lo = r.get("levelset", "n_lo", std::size_t(1));
        const auto hi = r.get("levelset", "n_hi", std::size_t(14));
        r.check(lo >= 1 && lo <= hi, "levelset.n_lo", "need 1 <= n_lo <= n_hi");
        r.get("levelset", "exact_up_to", std::size_t(14));
        r.check(r.get("levelset", "mc_samples", std::size_t(200000)) >= 1000, "levelset.mc_samples",
                "must be >= 1000");
    } else if (sub == "rate") {
        const double xi = r.get("rate", "xi", std::log(lip));
        r.check(std::isfinite(xi), "rate.xi", "must be finite");
        r.get("rate", "c", 0.4);
        const auto lo = r.get("rate", "n_lo", std::size_t(8));
        const auto hi = r.get("rate", "n_hi", std::size_t(14));
        r.check(lo >= 1 && lo <= hi, "rate.n_lo", "need 1 <= n_lo <= n_hi");
        r.check(r.get("rate", "tol", 0.05) >= 0, "rate.tol", "must be >= 0");
        const auto mp = r.get("rate", "max_period", std::size_t(8));
        r.check(mp >= 1 && mp <= 14, "rate.max_period", "must be in [1, 14] (rate_lower_bound precondition)");
        r.get("rate", "exact_up_to", std::size_t(14));
        r.check(r.get("rate", "mc_samples", std::size_t(200000)) >= 1000, "rate.mc_samples", "must be >= 1000");
    }
}

json parse_raw(const std::string& text, std::vector<std::string>& errs) {
    if (text.empty()) return json::object();
    try {
        json j = json::parse(text);
        if (!j.is_object()) {
            errs.push_back("config: top level must be an object");
            return json::object();
        }
        return j;
    } catch (const json::parse_error& e) {
        errs.push_back(std::string("config: ") + e.what());
        return json::object();
    }
}

}  // namespace

Resolution resolve(const std::string& config_json, const std::string& subcommand, std::uint64_t seed_override,
                   bool has_seed_override) {
    Resolution res;
    auto& errs = res.violations;
    if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end()) {
        errs.push_back("subcommand: unknown '" + subcommand + "'");
        return res;
    }
    const json raw = parse_raw(config_json, errs);
    Reader r(raw, errs);
    std::string sub = subcommand;
    if (raw.contains("subcommand")) {
        if (!raw.at("subcommand").is_string()) {
            errs.push_back("subcommand: must be a string");
        } else if (subcommand == "validate") {
            sub = raw.at("subcommand").get<std::string>();
            if (std::find(subcommands().begin(), subcommands().end(), sub) == subcommands().end())
                errs.push_back("subcommand: unknown '" + sub + "'");
        } else if (raw.at("subcommand").get<std::string>() != subcommand) {
            errs.push_back("subcommand: config is for '" + raw.at("subcommand").get<std::string>() +
                           "', not '" + subcommand + "'");
        }
    }
    r.out()["subcommand"] = sub;
    const std::uint64_t seed = r.get<std::uint64_t>("", "seed", 1);
    if (has_seed_override) r.out()["seed"] = seed_override;
    (void)seed;

    std::optional<MapSpec> map;
    const json map_spec = raw.contains("map") ? raw.at("map") : default_map();
    try {
        if (!map_spec.is_object()) throw ParameterError("must be an object");
        map = build_map(map_spec);
        json m = map_spec;
        if (!m.contains("file") && !m.contains("builder")) m["builder"] = "tent";
        m["label"] = map->label();
        r.out()["map"] = m;
    } catch (const std::exception& e) {
        errs.push_back(std::string("map: ") + e.what());
    }
    const json default_obs = sub == "perturb-demo" ? json{{"kind", "constant"}, {"value", 0.5}}
                                                   : json{{"kind", "coordinate"}};
    const json obs_spec = raw.contains("observable") ? raw.at("observable") : default_obs;
    try {
        if (!obs_spec.is_object()) throw ParameterError("must be an object");
        const auto phi = build_observable(obs_spec);
        r.out()["observable"] = obs_spec;
        r.out()["observable"]["label"] = phi.label();
    } catch (const std::exception& e) {
        errs.push_back(std::string("observable: ") + e.what());
    }
    if (sub == "perturb-demo") {
        const json pert = raw.contains("perturbation") ? raw.at("perturbation") : json{{"kind", "coordinate"}};
        try {
            build_observable(pert);
            r.out()["perturbation"] = pert;
        } catch (const std::exception& e) {
            errs.push_back(std::string("perturbation: ") + e.what());
        }
    }
    if (sub != "validate") resolve_section(r, sub, map ? &*map : nullptr);
    res.config = r.out().dump(2);
    return res;
}

std::vector<std::string> validate(const std::string& config_json, const std::string& subcommand) {
    return resolve(config_json, subcommand).violations;
}

namespace {

json estimate_json(const EntropyEstimate& e) {
    json j;
    j["method"] = e.method;
    j["extrapolated"] = num(e.extrapolated);
    j["fit_lo"] = e.fit_lo;
    j["fit_hi"] = e.fit_hi;
    if (e.eps) j["eps"] = *e.eps;
    if (e.delta_katok) j["delta"] = *e.delta_katok;
    json s = json::array();
    for (auto [n, v] : e.samples) s.push_back({{"n", n}, {"value", num(v)}});
    j["samples"] = s;
    return j;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

struct Ctx {
    json cfg;
    MapSpec map;
    Observable phi;
    std::uint64_t seed;
    json section() const { return cfg.value(cfg.at("subcommand").get<std::string>(), json::object()); }
};

RunResult run_classes(const Ctx& c) {
    const auto s = c.section();
    const GridPartition grid(s.at("h").get<double>());
    const auto g = build_transition_graph(c.map, grid, s.at("delta").get<double>());
    const auto classes = chain_classes(g);
    json res;
    res["edges"] = g.edge_count();
    res["class_count"] = classes.classes.size();
    res["recurrent_cells"] = classes.recurrent_cells.size();
    res["classes"] = json::parse(classes_json(classes, g));
    std::ostringstream csv;
    csv << "class,lo,hi,cells\n";
    for (std::size_t i = 0; i < classes.classes.size(); ++i) {
        const auto hl = hull(grid, classes.classes[i]);
        csv << i << ',' << fmt(hl.lo) << ',' << fmt(hl.hi) << ',' << classes.classes[i].size() << '\n';
    }
    return {0, res.dump(), csv.str()};
}

RunResult run_trace(const Ctx& c) {
    const auto s = c.section();
    const double delta = s.at("delta"), eps = s.at("eps");
    const std::size_t horizon = s.at("horizon"), trials = s.at("trials");
    const ExactMap exact(c.map);
    std::ostringstream csv;
    csv << "trial,x0,traced,error\n";
    std::size_t ok = 0;
    double worst = 0.0;
    std::optional<std::size_t> first_failure;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t ts = derive_seed(c.seed, t);
        const double x0 = double(ts >> 11) * 0x1.0p-53;
        const auto po = perturbed_orbit(c.map, x0, horizon, delta, ts);
        bool traced = false;
        double err = NAN;
        try {
            const auto tr = trace(c.map, po, eps);
            err = exact_trace_error(exact, *tr.exact_shadow_point, po.states);
            traced = err <= eps + 1e-12;
        } catch (const NotShadowed&) {
        }
        if (traced) {
            ++ok;
            worst = std::max(worst, err);
        } else if (!first_failure) {
            first_failure = t;
        }
        csv << t << ',' << fmt(x0) << ',' << (traced ? 1 : 0) << ',' << (std::isnan(err) ? "" : fmt(err)) << '\n';
    }
    json res{{"trials", trials}, {"traced", ok}, {"worst_error", worst}};
    res["first_failure"] = first_failure ? json(*first_failure) : json(nullptr);
    return {ok == trials ? 0 : 2, res.dump(), csv.str()};
}

RunResult run_modulus(const Ctx& c) {
    const auto s = c.section();
    const auto m = shadowing_modulus_report(c.map, s.at("eps"), s.at("trials"), s.at("horizon"), c.seed);
    json res{{"delta_hat", m.delta_hat}, {"diagnostic", m.diagnostic}};
    std::ostringstream csv;
    csv << "eps,delta_hat\n" << fmt(s.at("eps").get<double>()) << ',' << fmt(m.delta_hat) << '\n';
    return {m.delta_hat > 0 ? 0 : 2, res.dump(), csv.str()};
}

RunResult run_entropy(const Ctx& c) {
    const auto s = c.section();
    const auto lap = lap_entropy(c.map, s.at("lap_n_max"));
    const auto pool = grid_pool(std::size_t(1) << s.at("pool_log2").get<std::size_t>());
    const double eps = s.at("eps");
    const std::size_t lo = s.at("n_lo"), hi = s.at("n_hi");
    const EntropyEstimate sep = separated_entropy(c.map, pool, lo, hi, eps);
    json res;
    res["lap"] = estimate_json(lap);
    res["separated"] = estimate_json(sep);
    std::optional<EntropyEstimate> span;
    if (s.at("spanning").get<bool>()) {
        span = spanning_entropy(c.map, pool, lo, hi, eps);
        res["spanning"] = estimate_json(*span);
    }
    const auto sample = grid_pool(s.at("katok_sample"));
    const auto kat = katok_estimate(c.map, sample, s.at("katok_n_lo"), s.at("katok_n_hi"), s.at("katok_eps"));
    res["katok"] = estimate_json(kat);
    res["extrapolated"] = num(lap.extrapolated);
    std::ostringstream csv;
    csv << "method,n,value\n";
    for (const EntropyEstimate* e : std::initializer_list<const EntropyEstimate*>{&lap, &sep, span ? &*span : nullptr, &kat}) {
        if (!e) continue;
        for (auto [n, v] : e->samples) csv << e->method << ',' << n << ',' << fmt(v) << '\n';
    }
    return {0, res.dump(), csv.str()};
}

struct IrregularRun {
    json result;
    std::string csv;
    bool irregular = false;
};

IrregularRun irregular_pipeline(const MapSpec& map, const Observable& phi, const json& s, double eta,
                                std::uint64_t seed) {
    const GridPartition grid(s.at("h").get<double>());
    const auto g = build_transition_graph(map, grid, s.at("graph_delta").get<double>());
    ConstructionParams p;
    p.xi = parse_xi(s.at("xi"));
    p.eta = eta;
    p.max_period = s.at("max_period");
    p.seed = seed;
    if (s.contains("alpha_target") && !s.at("alpha_target").is_null()) p.alpha_target = s.at("alpha_target");
    if (s.contains("beta_target") && !s.at("beta_target").is_null()) p.beta_target = s.at("beta_target");
    IrregularRun out;
    BlockLibrary lib;
    try {
        lib = select_blocks(map, phi, g, s.at("class_id"), p);
    } catch (const ConstructionImpossible& e) {
        out.result = {{"irregular", false}, {"construction_impossible", e.what()}};
        out.csv = "n,b_n,A_b,a_next,A_a\n";
        return out;
    }
    const auto sched = plan_schedule(lib.L, lib.Q, lib.K, lib.P, lib.eta, lib.M_bound, s.at("n_steps"));
    const auto rep = verify_irregular(map, phi, sched, lib, s.at("n_check"), seed, s.at("horizon"));
    json libj{{"alpha", lib.alpha},       {"beta", lib.beta},
              {"zeta", lib.zeta},         {"eta", lib.eta},
              {"eps", lib.eps},           {"delta", lib.delta},
              {"M_bound", lib.M_bound},   {"blocks", lib.alpha_blocks.size()},
              {"L", lib.L},               {"Q", lib.Q},
              {"K", lib.K},               {"P", lib.P},
              {"W", lib.W},               {"J", lib.J},
              {"cycles_considered", lib.cycles_considered}};
    json cps = json::array();
    std::ostringstream csv;
    csv << "n,b_n,A_b,a_next,A_a\n";
    for (const auto& cp : rep.checkpoints) {
        json j{{"n", cp.n},         {"b_n", cp.b_n},           {"A_b", cp.A_b_Z},          {"a_next", cp.a_next},
               {"A_a", cp.A_a_Z},   {"liminf_ok", cp.liminf_ok}, {"limsup_ok", cp.limsup_ok}};
        if (cp.A_b_u) j["A_b_shadow"] = *cp.A_b_u;
        if (cp.A_a_u) j["A_a_shadow"] = *cp.A_a_u;
        cps.push_back(j);
        csv << cp.n << ',' << cp.b_n << ',' << fmt(cp.A_b_Z) << ',' << cp.a_next << ',' << fmt(cp.A_a_Z) << '\n';
    }
    out.result = {{"library", libj},
                  {"schedule", json::parse(schedule_json(sched))},
                  {"checkpoints", cps},
                  {"slack", rep.slack},
                  {"gap", rep.gap},
                  {"required_gap", rep.required_gap},
                  {"traced", rep.traced},
                  {"traced_units", rep.traced_units},
                  {"skipped_units", rep.skipped_units},
                  {"materialized_horizon", rep.materialized_horizon},
                  {"shadow_point", rep.shadow_point ? rep.shadow_point->convert_to<double>() : 0.0},
                  {"shadow_error", rep.shadow_error},
                  {"irregular", rep.irregular}};
    out.csv = csv.str();
    out.irregular = rep.irregular;
    return out;
}

RunResult run_irregular(const Ctx& c) {
    const auto s = c.section();
    auto r = irregular_pipeline(c.map, c.phi, s, s.at("eta"), c.seed);
    return {r.irregular ? 0 : 2, r.result.dump(), r.csv};
}

RunResult run_perturb(const Ctx& c) {
    const auto s = c.section();
    const auto pert = build_observable(c.cfg.at("perturbation"));
    const double eta = s.at("eta");
    json res;
    auto base = irregular_pipeline(c.map, c.phi, s, eta, c.seed);
    const bool base_blocked = base.result.contains("construction_impossible");
    res["base"] = {{"observable", c.phi.label()},
                   {"construction_impossible", base_blocked},
                   {"irregular", base.irregular}};
    if (base_blocked) res["base"]["reason"] = base.result.at("construction_impossible");
    json rows = json::array();
    std::ostringstream csv;
    csv << "k,eta,alpha,zeta,gap,irregular\n";
    bool all = true;
    for (std::size_t k : s.at("ks").get<std::vector<std::size_t>>()) {
        const double t = 1.0 / double(k);
        const auto phik = c.phi.plus_scaled(pert, t);
        auto r = irregular_pipeline(c.map, phik, s, eta * t, c.seed);
        all = all && r.irregular;
        json row{{"k", k}, {"eta", eta * t}, {"irregular", r.irregular}};
        if (r.result.contains("library")) {
            row["alpha"] = r.result["library"]["alpha"];
            row["zeta"] = r.result["library"]["zeta"];
            row["gap"] = r.result["gap"];
            csv << k << ',' << fmt(eta * t) << ',' << fmt(r.result["library"]["alpha"].get<double>()) << ','
                << fmt(r.result["library"]["zeta"].get<double>()) << ',' << fmt(r.result["gap"].get<double>()) << ','
                << (r.irregular ? 1 : 0) << '\n';
        } else {
            row["construction_impossible"] = r.result.at("construction_impossible");
        }
        rows.push_back(row);
    }
    res["perturbed"] = rows;
    res["activated"] = all;
    return {all ? 0 : 2, res.dump(), csv.str()};
}

std::string rate_csv(const std::vector<RateRow>& rows) {
    std::ostringstream csv;
    csv << "n,method,m_Dn,rate,stderr\n";
    for (const auto& r : rows)
        csv << r.n << ',' << (r.exact ? "exact" : "mc") << ',' << fmt(r.m_Dn) << ',' << fmt(r.rate) << ','
            << fmt(r.stderr_) << '\n';
    return csv.str();
}

json rows_json(const std::vector<RateRow>& rows) {
    json a = json::array();
    for (const auto& r : rows)
        a.push_back({{"n", r.n}, {"exact", r.exact}, {"m_Dn", r.m_Dn}, {"rate", num(r.rate)}, {"stderr", r.stderr_}});
    return a;
}

RunResult run_levelset(const Ctx& c) {
    const auto s = c.section();
    SeriesOptions so;
    so.exact_up_to = s.at("exact_up_to");
    so.mc_samples = s.at("mc_samples");
    so.seed = c.seed;
    const auto rows = rate_series(c.map, c.phi, s.at("c"), s.at("n_lo"), s.at("n_hi"), so);
    json res{{"c", s.at("c")}, {"series", rows_json(rows)}};
    return {0, res.dump(), rate_csv(rows)};
}

RunResult run_rate(const Ctx& c) {
    const auto s = c.section();
    SeriesOptions so;
    so.exact_up_to = s.at("exact_up_to");
    so.mc_samples = s.at("mc_samples");
    so.seed = c.seed;
    RateBoundOptions bo;
    bo.seed = c.seed;
    const auto v = check_theorem_vminus(c.map, c.phi, s.at("xi"), s.at("c"), s.at("n_lo"), s.at("n_hi"),
                                        s.at("tol"), s.at("max_period"), so, bo);
    json margins = json::array();
    for (double m : v.margins) margins.push_back(num(m));
    json res{{"holds", v.holds},
             {"vacuous", v.vacuous},
             {"bound", num(v.bound)},
             {"bound_witness", v.report.bound_witness},
             {"min_margin", num(v.min_margin)},
             {"margins", margins},
             {"series", rows_json(v.report.series)}};
    return {v.holds ? 0 : 2, res.dump(), rate_csv(v.report.series)};
}

}  // namespace

RunResult run(const std::string& subcommand, const std::string& resolved_config) {
    Ctx c;
    c.cfg = json::parse(resolved_config);
    c.map = build_map(c.cfg.at("map"));
    c.phi = build_observable(c.cfg.at("observable"));
    c.seed = c.cfg.at("seed").get<std::uint64_t>();
    RunResult r;
    if (subcommand == "classes") r = run_classes(c);
    else if (subcommand == "trace") r = run_trace(c);
    else if (subcommand == "modulus") r = run_modulus(c);
    else if (subcommand == "entropy") r = run_entropy(c);
    else if (subcommand == "irregular") r = run_irregular(c);
    else if (subcommand == "perturb-demo") r = run_perturb(c);
    else if (subcommand == "levelset") r = run_levelset(c);
    else if (subcommand == "rate") r = run_rate(c);
    else throw ParameterError("run: unknown subcommand '" + subcommand + "'");
    json report{{"subcommand", subcommand},
                {"config", c.cfg},
                {"exit_code", r.exit_code},
                {"result", json::parse(r.report_json)}};
    r.report_json = report.dump(2) + "\n";
    return r;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shadowkit: shadowing, chain classes and Birkhoff irregularity for interval maps"};
    app.require_subcommand(1, 1);
    std::string config_path, out_dir = ".";
    std::uint64_t seed = 1;
    unsigned threads = 0;
    app.add_option("--config", config_path, "JSON config file");
    auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the config)");
    app.add_option("--threads", threads, "worker thread cap (0 = hardware)");
    app.add_option("--out", out_dir, "output directory");
    for (const auto& name : subcommands()) app.add_subcommand(name)->fallthrough();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    const std::string sub = app.get_subcommands().front()->get_name();
    const auto started = std::chrono::system_clock::now();
    try {
        const std::string text = config_path.empty() ? std::string() : read_file(config_path);
        const auto res = resolve(text, sub, seed, seed_opt->count() > 0);
        if (threads > 0) set_thread_count(threads);
        std::filesystem::create_directories(out_dir);
        const std::filesystem::path out(out_dir);
        int code = 0;
        if (sub == "validate") {
            json report{{"subcommand", "validate"},
                        {"config", json::parse(res.config)},
                        {"violations", res.violations}};
            code = res.violations.empty() ? 0 : 2;
            report["exit_code"] = code;
            for (const auto& v : res.violations) std::cerr << v << '\n';
            write_file(out / "report.json", report.dump(2) + "\n");
        } else {
            if (!res.violations.empty()) {
                for (const auto& v : res.violations) std::cerr << "invalid config: " << v << '\n';
                return 1;
            }
            const auto r = run(sub, res.config);
            code = r.exit_code;
            write_file(out / "report.json", r.report_json);
            write_file(out / "series.csv", r.series_csv);
        }
        const auto finished = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(started);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        json meta{{"subcommand", sub},
                  {"threads", thread_count()},
                  {"started_utc", stamp},
                  {"elapsed_seconds", std::chrono::duration<double>(finished - started).count()},
                  {"exit_code", code}};
        write_file(out / "meta.json", meta.dump(2) + "\n");
        std::cout << sub << ": exit " << code << " (" << (out / "report.json").string() << ")\n";
        return code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace shadowkit::cli
