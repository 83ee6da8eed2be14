#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "shadowkit/chain.hpp"
#include "shadowkit/map.hpp"
#include "shadowkit/observable.hpp"

namespace shadowkit {

struct BirkhoffReport {
    /// (n, A_n) at a stride that keeps at most ~2000 rows.
    std::vector<std::pair<std::size_t, double>> running;
    double liminf_est = 0.0;
    double limsup_est = 0.0;
    double gap = 0.0;
    std::size_t tail_start = 1;
    std::size_t n_max = 0;
};

double birkhoff_average(const MapSpec& map, const Observable& phi, double x, std::size_t n);
double birkhoff_average(const ExactMap& map, const Observable& phi, const Rational& x, std::size_t n);

/// A_1, ..., A_n.
std::vector<double> running_averages(const MapSpec& map, const Observable& phi, double x, std::size_t n);
std::vector<double> running_averages(const ExactMap& map, const Observable& phi, const Rational& x,
                                     std::size_t n);

BirkhoffReport irregularity_report(const MapSpec& map, const Observable& phi, double x,
                                   std::size_t n_max, double tail_fraction = 0.5);
BirkhoffReport irregularity_report(const ExactMap& map, const Observable& phi, const Rational& x,
                                   std::size_t n_max, double tail_fraction = 0.5);
/// Tail min/max over given (n, A_n) rows with n >= tail_start.
BirkhoffReport report_from_rows(std::vector<std::pair<std::size_t, double>> rows, std::size_t tail_start);

bool level_set_member(const MapSpec& map, const Observable& phi, double x, double a, double theta,
                      std::size_t n_max);
bool level_set_member(const BirkhoffReport& report, double a, double theta);

struct EmpiricalMeasure {
    GridPartition grid;
    std::vector<double> weights;
    std::size_t sample_size = 0;
};

EmpiricalMeasure empirical_measure(const MapSpec& map, double x, std::size_t n, const GridPartition& grid);
EmpiricalMeasure empirical_measure(const ExactMap& map, const Rational& x, std::size_t n,
                                   const GridPartition& grid);
EmpiricalMeasure empirical_measure(const std::vector<double>& states, const GridPartition& grid);
/// Lebesgue measure discretized on the grid.
EmpiricalMeasure uniform_measure(const GridPartition& grid);

/// Test family: phi_0 = x/2, phi_k = sin(k pi x)/(1 + k pi), k = 1..32.
inline constexpr int kBlFamilySize = 33;
double bl_test_function(int k, double x);
/// Sum over the family of 2^-(k+1) |int phi_k dmu - int phi_k dnu|, cell-midpoint quadrature.
double bl_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);
double integrate(const EmpiricalMeasure& mu, const std::function<double(double)>& f);

}  // namespace shadowkit
