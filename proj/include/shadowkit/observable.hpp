#pragma once

#include <string>
#include <vector>

namespace shadowkit {

/// Continuous observable Phi on [0,1].
class Observable {
public:
    enum class Kind { coordinate, cosine, piecewise_linear, constant };

    static Observable coordinate();
    /// cos(2 pi k x).
    static Observable cosine(int k);
    static Observable piecewise_linear(std::vector<double> breakpoints, std::vector<double> values,
                                       std::string label = "pl");
    static Observable constant(double c);

    double operator()(double x) const;

    Kind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    double lipschitz() const;
    double sup_abs() const;
    double min_value() const;
    double max_value() const;

    /// True for every kind except cosine.
    bool is_piecewise_linear() const { return kind_ != Kind::cosine; }
    /// Nodes of the PL representation; throws ParameterError for cosine.
    const std::vector<double>& breakpoints() const;
    const std::vector<double>& values() const;

    int frequency() const { return k_; }

    /// phi + t * other, both piecewise linear; nodes are merged.
    Observable plus_scaled(const Observable& other, double t) const;

private:
    Kind kind_ = Kind::coordinate;
    std::string label_;
    int k_ = 0;
    std::vector<double> bps_;
    std::vector<double> vals_;
};

}  // namespace shadowkit
