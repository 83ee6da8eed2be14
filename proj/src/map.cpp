#include "shadowkit/map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "shadowkit/errors.hpp"

namespace shadowkit {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

MapSpec::MapSpec(std::vector<double> breakpoints, std::vector<double> values, std::string label)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)), label_(std::move(label)) {
    if (breakpoints_.size() < 2)
        throw ParameterError("MapSpec needs at least two breakpoints");
    if (breakpoints_.size() != values_.size())
        throw ParameterError("MapSpec: |values| = " + std::to_string(values_.size()) +
                             " but |breakpoints| = " + std::to_string(breakpoints_.size()));
    if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0)
        throw ParameterError("MapSpec: breakpoints must start at 0 and end at 1");
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        if (!std::isfinite(breakpoints_[i]) || !std::isfinite(values_[i]))
            throw ParameterError("MapSpec: non-finite node at index " + std::to_string(i));
        if (i > 0 && !(breakpoints_[i] > breakpoints_[i - 1]))
            throw ParameterError("MapSpec: breakpoints not strictly increasing at index " +
                                 std::to_string(i));
        if (values_[i] < 0.0 || values_[i] > 1.0)
            throw ParameterError("MapSpec: value " + fmt(values_[i]) + " at index " +
                                 std::to_string(i) + " is outside [0,1]");
    }
    slopes_.resize(breakpoints_.size() - 1);
    for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k)
        slopes_[k] = (values_[k + 1] - values_[k]) / (breakpoints_[k + 1] - breakpoints_[k]);
}

std::size_t MapSpec::segment_of(double x) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    std::size_t k = it == breakpoints_.begin() ? 0 : std::size_t(it - breakpoints_.begin()) - 1;
    if (k > 0 && breakpoints_[k] == x) --k;
    return std::min(k, segment_count() - 1);
}

double MapSpec::eval_on_segment(std::size_t k, double x) const {
    // Interpolate from the nearer node; slope-2 tents then stay exact on half the segment.
    const double left = x - breakpoints_[k];
    const double right = x - breakpoints_[k + 1];
    if (std::abs(left) <= std::abs(right)) return values_[k] + left * slopes_[k];
    return values_[k + 1] + right * slopes_[k];
}

double eval(const MapSpec& map, double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw DomainError("eval: state " + fmt(x) + " outside [0,1]");
    const std::size_t k = map.segment_of(x);
    return std::clamp(map.eval_on_segment(k, x), 0.0, 1.0);
}

ExactMap::ExactMap(const MapSpec& map) : spec_(map) {
    for (double b : map.breakpoints()) breakpoints_.emplace_back(b);
    for (double v : map.values()) values_.emplace_back(v);
    for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k)
        slopes_.push_back((values_[k + 1] - values_[k]) / (breakpoints_[k + 1] - breakpoints_[k]));
}

std::size_t ExactMap::segment_of(const Rational& x) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    std::size_t k = it == breakpoints_.begin() ? 0 : std::size_t(it - breakpoints_.begin()) - 1;
    return std::min(k, segment_count() - 1);
}

Rational ExactMap::operator()(const Rational& x) const {
    if (x < 0 || x > 1) throw DomainError("eval: rational state outside [0,1]");
    const std::size_t k = segment_of(x);
    return values_[k] + (x - breakpoints_[k]) * slopes_[k];
}

Orbit orbit(const MapSpec& map, double x0, std::size_t n) {
    if (n == 0) throw ParameterError("orbit: n must be >= 1");
    Orbit out{{}, map.label()};
    out.states.reserve(n);
    double x = x0;
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("orbit: x0 " + fmt(x0) + " outside [0,1]");
    for (std::size_t i = 0; i < n; ++i) {
        out.states.push_back(x);
        if (i + 1 < n) x = eval(map, x);
    }
    return out;
}

double bowen_dist(const MapSpec& map, double x, double y, std::size_t n) {
    if (n == 0) throw ParameterError("bowen_dist: n must be >= 1");
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        d = std::max(d, std::abs(x - y));
        if (j + 1 < n) {
            x = eval(map, x);
            y = eval(map, y);
        }
    }
    return d;
}

double lipschitz_constant(const MapSpec& map) {
    double l = 0.0;
    for (std::size_t k = 0; k < map.segment_count(); ++k) l = std::max(l, std::abs(map.slope(k)));
    return l;
}

MapSpec tent(double slope) {
    if (!(slope > 0.0 && slope <= 2.0))
        throw ParameterError("tent: slope " + fmt(slope) + " outside (0,2]");
    std::ostringstream label;
    label << "tent(" << fmt(slope) << ")";
    return MapSpec({0.0, 0.5, 1.0}, {0.0, slope / 2.0, 0.0}, label.str());
}

MapSpec identity_map() { return MapSpec({0.0, 1.0}, {0.0, 1.0}, "identity"); }

MapSpec linear_map(double factor) {
    if (!(factor >= 0.0 && factor <= 1.0))
        throw ParameterError("linear_map: factor " + fmt(factor) + " outside [0,1]");
    return MapSpec({0.0, 1.0}, {0.0, factor}, "linear(" + fmt(factor) + ")");
}

namespace {

double exv_a(std::size_t n) { return std::ldexp(1.0, -int(n)); }
double exv_b(std::size_t n) { return 5.0 * exv_a(n + 1) / 4.0; }

void check_exv_depth(std::size_t depth) {
    // Block widths 3/8 * 2^-n must stay well above the spacing of doubles near 1.
    if (depth > 40)
        throw ResolutionError("example_exv: depth " + std::to_string(depth) +
                              " underflows double resolution (max 40)");
}

}  // namespace

MapSpec example_exv(std::size_t depth, std::span<const double> slopes) {
    check_exv_depth(depth);
    if (slopes.size() != depth + 1)
        throw ParameterError("example_exv: need " + std::to_string(depth + 1) + " slopes, got " +
                             std::to_string(slopes.size()));
    const double lo = std::sqrt(2.0);
    for (std::size_t n = 0; n < slopes.size(); ++n)
        if (!(slopes[n] > lo && slopes[n] <= 2.0))
            throw ParameterError("example_exv: slope[" + std::to_string(n) + "] = " + fmt(slopes[n]) +
                                 " outside (sqrt 2, 2]");
    if (slopes[0] != 2.0) throw ParameterError("example_exv: slope[0] must equal 2");

    // Nodes in original coordinates on [b_depth, 1], left to right.
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t k = depth + 1; k-- > 0;) {
        const double a = exv_a(k);
        const double b = exv_b(k);
        xs.push_back(b);
        ys.push_back(b);
        xs.push_back(0.5 * (a + b));
        ys.push_back(b + slopes[k] * (a - b) / 2.0);
        // a_k closes the tent; for k > 0 it also opens the connector up to b_{k-1}.
        xs.push_back(a);
        ys.push_back(b);
    }
    const double origin = exv_b(depth);
    const double scale = 1.0 - origin;
    for (auto& x : xs) x = (x - origin) / scale;
    for (auto& y : ys) y = std::clamp((y - origin) / scale, 0.0, 1.0);
    xs.front() = 0.0;
    xs.back() = 1.0;

    std::ostringstream label;
    label << "exv(depth=" << depth << ")";
    return MapSpec(std::move(xs), std::move(ys), label.str());
}

MapSpec example_exv(std::size_t depth) {
    check_exv_depth(depth);
    std::vector<double> slopes(depth + 1, 2.0);
    return example_exv(depth, slopes);
}

std::vector<Interval> exv_cores(std::size_t depth) {
    check_exv_depth(depth);
    const double origin = exv_b(depth);
    const double scale = 1.0 - origin;
    std::vector<Interval> cores;
    for (std::size_t n = 0; n <= depth; ++n)
        cores.push_back({(exv_b(n) - origin) / scale, (exv_a(n) - origin) / scale});
    return cores;
}

namespace {

std::size_t line_at(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + std::size_t(std::count(text.begin(), text.begin() + std::ptrdiff_t(offset), '\n'));
}

// Line holding element `index` of the array stored under `key`, or of the key itself.
std::size_t line_of(const std::string& text, const std::string& key, std::ptrdiff_t index = -1) {
    const std::size_t k = text.find("\"" + key + "\"");
    if (k == std::string::npos) return 1;
    if (index < 0) return line_at(text, k);
    std::size_t pos = text.find('[', k);
    if (pos == std::string::npos) return line_at(text, k);
    std::ptrdiff_t seen = 0;
    int depth = 0;
    for (std::size_t i = pos + 1; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '[' || c == '{') ++depth;
        if (c == ']' || c == '}') {
            if (depth == 0) break;
            --depth;
        }
        if (c == ',' && depth == 0) {
            ++seen;
            continue;
        }
        if (seen == index && !std::isspace(static_cast<unsigned char>(c))) return line_at(text, i);
    }
    return line_at(text, k);
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& msg) {
    throw FormatError(source + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

MapSpec parse_map_json(const std::string& text, const std::string& source) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(source, line_at(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
    }
    if (!doc.is_object()) fail(source, 1, "expected a JSON object");
    for (const char* key : {"breakpoints", "values"})
        if (!doc.contains(key) || !doc[key].is_array())
            fail(source, line_of(text, key), std::string("missing array \"") + key + "\"");

    std::vector<double> bps;
    std::vector<double> vals;
    for (const char* key : {"breakpoints", "values"}) {
        auto& out = std::string(key) == "breakpoints" ? bps : vals;
        const auto& arr = doc[key];
        for (std::size_t i = 0; i < arr.size(); ++i) {
            if (!arr[i].is_number())
                fail(source, line_of(text, key, std::ptrdiff_t(i)),
                     std::string(key) + "[" + std::to_string(i) + "] is not a number");
            out.push_back(arr[i].get<double>());
        }
    }
    std::string label = doc.value("label", std::string("file"));

    if (bps.size() != vals.size())
        fail(source, line_of(text, "values"),
             "|values| = " + std::to_string(vals.size()) + " differs from |breakpoints| = " +
                 std::to_string(bps.size()));
    if (bps.size() < 2) fail(source, line_of(text, "breakpoints"), "need at least two breakpoints");
    if (bps.front() != 0.0) fail(source, line_of(text, "breakpoints", 0), "first breakpoint must be 0");
    if (bps.back() != 1.0)
        fail(source, line_of(text, "breakpoints", std::ptrdiff_t(bps.size() - 1)),
             "last breakpoint must be 1");
    for (std::size_t i = 1; i < bps.size(); ++i)
        if (!(bps[i] > bps[i - 1]))
            fail(source, line_of(text, "breakpoints", std::ptrdiff_t(i)),
                 "breakpoints[" + std::to_string(i) + "] = " + fmt(bps[i]) + " is not increasing");
    for (std::size_t i = 0; i < vals.size(); ++i)
        if (!(vals[i] >= 0.0 && vals[i] <= 1.0))
            fail(source, line_of(text, "values", std::ptrdiff_t(i)),
                 "values[" + std::to_string(i) + "] = " + fmt(vals[i]) + " outside [0,1]");
    return MapSpec(std::move(bps), std::move(vals), std::move(label));
}

MapSpec load_map_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError(path + ":0: cannot open map file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_map_json(ss.str(), path);
}

std::string map_to_json(const MapSpec& map) {
    nlohmann::json j;
    j["label"] = map.label();
    j["breakpoints"] = map.breakpoints();
    j["values"] = map.values();
    return j.dump(2);
}

ShiftSystem::ShiftSystem(int k, double base) : alphabet_size(k), metric_base(base) {
    if (k < 2) throw ParameterError("ShiftSystem: alphabet size must be >= 2");
    if (!(base > 0.0 && base < 1.0)) throw ParameterError("ShiftSystem: metric base must be in (0,1)");
}

double ShiftSystem::distance(const Word& u, const Word& v) const {
    const std::size_t n = std::min(u.size(), v.size());
    for (std::size_t i = 0; i < n; ++i)
        if (u[i] != v[i]) return std::pow(metric_base, double(i));
    return 0.0;
}

ShiftSystem::Word ShiftSystem::shift(const Word& u) {
    if (u.empty()) return {};
    return Word(u.begin() + 1, u.end());
}

double ShiftSystem::entropy() const { return std::log(double(alphabet_size)); }

}  // namespace shadowkit
