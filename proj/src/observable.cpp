#include "shadowkit/observable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "shadowkit/errors.hpp"

namespace shadowkit {

Observable Observable::coordinate() {
    Observable o;
    o.kind_ = Kind::coordinate;
    o.label_ = "coordinate";
    o.bps_ = {0.0, 1.0};
    o.vals_ = {0.0, 1.0};
    return o;
}

Observable Observable::cosine(int k) {
    if (k < 1) throw ParameterError("cosine observable: k must be >= 1");
    Observable o;
    o.kind_ = Kind::cosine;
    o.k_ = k;
    o.label_ = "cosine(" + std::to_string(k) + ")";
    return o;
}

Observable Observable::piecewise_linear(std::vector<double> breakpoints, std::vector<double> values,
                                        std::string label) {
    if (breakpoints.size() < 2 || breakpoints.size() != values.size())
        throw ParameterError("piecewise-linear observable: need >= 2 nodes and matching sizes");
    if (breakpoints.front() != 0.0 || breakpoints.back() != 1.0)
        throw ParameterError("piecewise-linear observable: breakpoints must span [0,1]");
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (!std::isfinite(breakpoints[i]) || !std::isfinite(values[i]))
            throw ParameterError("piecewise-linear observable: non-finite node");
        if (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))
            throw ParameterError("piecewise-linear observable: breakpoints not increasing");
    }
    Observable o;
    o.kind_ = Kind::piecewise_linear;
    o.label_ = std::move(label);
    o.bps_ = std::move(breakpoints);
    o.vals_ = std::move(values);
    return o;
}

Observable Observable::constant(double c) {
    if (!std::isfinite(c)) throw ParameterError("constant observable: value must be finite");
    Observable o;
    o.kind_ = Kind::constant;
    std::ostringstream os;
    os.precision(17);
    os << "constant(" << c << ")";
    o.label_ = os.str();
    o.bps_ = {0.0, 1.0};
    o.vals_ = {c, c};
    return o;
}

double Observable::operator()(double x) const {
    switch (kind_) {
        case Kind::coordinate: return x;
        case Kind::constant: return vals_[0];
        case Kind::cosine: return std::cos(2.0 * std::numbers::pi * k_ * x);
        case Kind::piecewise_linear: break;
    }
    if (x <= 0.0) return vals_.front();
    if (x >= 1.0) return vals_.back();
    auto it = std::upper_bound(bps_.begin(), bps_.end(), x);
    const std::size_t k = std::size_t(it - bps_.begin()) - 1;
    const double t = (x - bps_[k]) / (bps_[k + 1] - bps_[k]);
    return vals_[k] + t * (vals_[k + 1] - vals_[k]);
}

double Observable::lipschitz() const {
    if (kind_ == Kind::cosine) return 2.0 * std::numbers::pi * k_;
    double l = 0.0;
    for (std::size_t k = 0; k + 1 < bps_.size(); ++k)
        l = std::max(l, std::abs((vals_[k + 1] - vals_[k]) / (bps_[k + 1] - bps_[k])));
    return l;
}

double Observable::min_value() const {
    if (kind_ == Kind::cosine) return -1.0;
    return *std::min_element(vals_.begin(), vals_.end());
}

double Observable::max_value() const {
    if (kind_ == Kind::cosine) return 1.0;
    return *std::max_element(vals_.begin(), vals_.end());
}

double Observable::sup_abs() const { return std::max(std::abs(min_value()), std::abs(max_value())); }

const std::vector<double>& Observable::breakpoints() const {
    if (kind_ == Kind::cosine) throw ParameterError("cosine observable has no piecewise-linear nodes");
    return bps_;
}

const std::vector<double>& Observable::values() const {
    if (kind_ == Kind::cosine) throw ParameterError("cosine observable has no piecewise-linear nodes");
    return vals_;
}

Observable Observable::plus_scaled(const Observable& other, double t) const {
    std::vector<double> nodes = breakpoints();
    const auto& more = other.breakpoints();
    nodes.insert(nodes.end(), more.begin(), more.end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    std::vector<double> vals;
    vals.reserve(nodes.size());
    for (double x : nodes) vals.push_back((*this)(x) + t * other(x));
    std::ostringstream os;
    os.precision(6);
    os << label_ << "+" << t << "*" << other.label_;
    return piecewise_linear(std::move(nodes), std::move(vals), os.str());
}

}  // namespace shadowkit
