#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shadowkit/map.hpp"

namespace shadowkit {

struct EntropyEstimate {
    std::string method;
    /// (n, log count) for counting methods; (n, value) otherwise.
    std::vector<std::pair<std::size_t, double>> samples;
    double extrapolated = 0.0;
    std::optional<double> eps;
    std::optional<double> delta_katok;
    /// n-range used by the least-squares fit.
    std::size_t fit_lo = 0;
    std::size_t fit_hi = 0;
};

/// Least-squares slope of y against x.
double fit_slope(std::span<const std::pair<double, double>> points);

/// Midpoints (i + 1/2)/size.
std::vector<double> grid_pool(std::size_t size);

/// Row-major matrix of the first n iterates of every pool point.
class OrbitTable {
public:
    OrbitTable(const MapSpec& map, std::span<const double> points, std::size_t n);
    OrbitTable(std::vector<std::vector<double>> orbits, std::size_t n);

    std::size_t size() const { return count_; }
    std::size_t length() const { return n_; }
    const double* row(std::size_t i) const { return data_.data() + i * n_; }
    double start(std::size_t i) const { return data_[i * n_]; }
    /// Bowen distance over the first m <= length() iterates.
    double distance(std::size_t i, std::size_t j, std::size_t m) const;

private:
    std::size_t count_ = 0;
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Greedy maximal (n, eps)-separated subset (pairwise d_n > eps), scanning the
/// pool in increasing order; returns pool indices.
std::vector<std::size_t> separated_set(const MapSpec& map, std::span<const double> pool, std::size_t n, double eps);
std::vector<std::size_t> separated_set(const OrbitTable& table, std::size_t n, double eps);

/// Size of a greedy (n, eps)-spanning subset of the pool (closed balls).
std::size_t spanning_number(const MapSpec& map, std::span<const double> pool, std::size_t n, double eps);
std::size_t spanning_number(const OrbitTable& table, std::size_t n, double eps);

/// Number of maximal monotone pieces of T^n for n = 1..n_max.
std::vector<double> lap_counts(const MapSpec& map, std::size_t n_max, std::size_t cap = 10'000'000);
EntropyEstimate lap_entropy(const MapSpec& map, std::size_t n_max);

/// Separated counts for n in [n_lo, n_hi]; the slope is fitted over the n
/// whose count stays below a third of the pool (the rest is pool-limited).
EntropyEstimate separated_entropy(const MapSpec& map, std::span<const double> pool, std::size_t n_lo,
                                  std::size_t n_hi, double eps);
EntropyEstimate spanning_entropy(const MapSpec& map, std::span<const double> pool, std::size_t n_lo,
                                 std::size_t n_hi, double eps);

/// Greedy count of (n, eps)-Bowen balls centred at sample points covering at
/// least (1 - delta) of the sample.
std::size_t katok_entropy(const MapSpec& map, std::span<const double> sample, std::size_t n, double eps,
                          double delta = 0.5);
std::size_t katok_count(const OrbitTable& table, std::size_t n, double eps, double delta);
EntropyEstimate katok_estimate(const MapSpec& map, std::span<const double> sample, std::size_t n_lo,
                               std::size_t n_hi, double eps, double delta = 0.5);

/// Lebesgue measure of B_n(x, eps) for n = 1..n_max.
std::vector<double> bowen_ball_measures(const MapSpec& map, double x, std::size_t n_max, double eps);
double bowen_ball_measure(const MapSpec& map, double x, std::size_t n, double eps);
/// -log m(B_n(x, eps)) / n for n = 1..n_max.
EntropyEstimate local_reference_entropy(const MapSpec& map, double x, std::size_t n_max, double eps);

struct VMinusReport {
    bool holds = true;
    /// min over checks of log m(B_n(x,eps)) - log(C e^{-n xi}).
    double worst_margin = 0.0;
    double worst_x = 0.0;
    std::size_t worst_n = 0;
    std::size_t checks = 0;
};

VMinusReport check_v_minus(const MapSpec& map, double xi_const, double eps, double C,
                           std::span<const double> sample, std::size_t n_max);

}  // namespace shadowkit
