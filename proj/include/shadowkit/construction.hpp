#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shadowkit/chain.hpp"
#include "shadowkit/map.hpp"
#include "shadowkit/observable.hpp"
#include "shadowkit/periodic.hpp"
#include "shadowkit/shadowing.hpp"

namespace shadowkit {

struct Fraction {
    long num = 1;
    long den = 2;
    double value() const { return double(num) / double(den); }
};

/// xi must be one of 1/4, 1/3, 1/2, 2/3, 3/4.
Fraction parse_xi(double xi);

struct ConstructionParams {
    Fraction xi{1, 2};
    double eta = 0.01;
    /// 0 selects eta / (8 Lip(phi)).
    double eps = 0.0;
    /// 0 selects shadowing_modulus(map, eps) / 2.
    double delta = 0.0;
    std::size_t max_period = 8;
    std::optional<double> alpha_target;
    std::optional<double> beta_target;
    std::size_t L_target = 0;
    std::size_t library_cap = 64;
    std::size_t modulus_trials = 20;
    std::size_t modulus_horizon = 300;
    std::uint64_t seed = 1;
};

struct BlockLibrary {
    /// Length-L blocks: the alpha-cycles read from different phases.
    std::vector<std::vector<double>> alpha_blocks;
    /// Length-K blocks: xi J alpha-steps, chain w, (1 - xi) J beta-steps; gamma_blocks[k]
    /// starts where alpha_blocks[k] starts.
    std::vector<std::vector<double>> gamma_blocks;
    /// q[k][k']: from the end of alpha block k to the start of block k' (length Q).
    std::vector<std::vector<std::vector<double>>> q;
    /// w[k]: inside gamma block k (length W).
    std::vector<std::vector<double>> w;
    /// p[k']: from the end of any gamma block to the start of block k' (length P).
    std::vector<std::vector<double>> p;
    std::size_t L = 0, Q = 0, K = 0, P = 0, W = 0, J = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double zeta = 0.0;
    Fraction xi;
    double eta = 0.0;
    double eps = 0.0;
    double delta = 0.0;
    double M_bound = 0.0;
    PeriodicOrbit alpha_cycle;
    PeriodicOrbit beta_cycle;
    std::size_t cycles_considered = 0;
};

/// Finds alpha/beta cycles inside the chain class and assembles blocks and chains.
BlockLibrary select_blocks(const MapSpec& map, const Observable& phi, const TransitionGraph& graph,
                           std::size_t class_id, const ConstructionParams& params);

/// Shortest delta-chain c_1..c_m from a to b (|T a - c_1|, |T c_i - c_{i+1}|, |T c_m - b| all
/// below delta), or exactly `length` steps when given. Empty optional when none exists
/// within max_length steps.
std::optional<std::vector<double>> delta_chain(const MapSpec& map, double a, double b, double delta,
                                               std::optional<std::size_t> length = std::nullopt,
                                               std::size_t max_length = 200);

struct Schedule {
    std::size_t L = 0, Q = 0, K = 0, P = 0;
    std::uint64_t lambda_ = 0;
    std::uint64_t kappa_ = 0;
    double eta = 0.0;
    double M_bound = 0.0;
    std::size_t n_steps = 0;
    /// Index 0 holds n = 1.
    std::vector<std::uint64_t> l_n, l_n_prime, a_n, b_n, M_n, M_n_prime;
    /// a_{n_steps + 1}.
    std::uint64_t end = 0;
};

Schedule plan_schedule(std::size_t L, std::size_t Q, std::size_t K, std::size_t P, double eta,
                       double M_bound, std::size_t n_steps);

/// Block index used by unit j of segment n (C1 when gamma is false).
std::size_t unit_block(const BlockLibrary& lib, std::uint64_t seed, std::size_t n, bool gamma,
                       std::uint64_t j);

/// tx^(1) ty^(1) tx^(2) ... truncated at horizon.
PseudoOrbit build_pseudo_orbit(const BlockLibrary& lib, const Schedule& sched, std::size_t horizon,
                               std::uint64_t seed);

struct Checkpoint {
    std::size_t n = 0;
    std::uint64_t b_n = 0;
    std::uint64_t a_next = 0;
    /// Birkhoff averages of the pseudo-orbit Z (closed form).
    double A_b_Z = 0.0;
    double A_a_Z = 0.0;
    /// Averages along the materialized shadow point, when its horizon reaches the checkpoint.
    std::optional<double> A_b_u;
    std::optional<double> A_a_u;
    bool liminf_ok = false;
    bool limsup_ok = false;
};

struct IrregularReport {
    std::vector<Checkpoint> checkpoints;
    double slack = 0.0;
    /// max_n (A_{a_{n+1}} - slack) - min_n (A_{b_n} + slack): certified oscillation of u.
    double gap = 0.0;
    double required_gap = 0.0;  // zeta - alpha - 8 eta - 2 slack
    bool traced = false;
    std::size_t traced_units = 0;
    std::size_t skipped_units = 0;
    std::size_t materialized_horizon = 0;
    std::optional<Rational> shadow_point;
    double shadow_error = 0.0;
    bool irregular = false;
};

/// Certifies that the pseudo-orbit up to a_{n_check+1} is eps-traced (forward
/// refinement with repeated-block skipping), traces the first `horizon`
/// states exactly, and evaluates the checkpoint bounds.
IrregularReport verify_irregular(const MapSpec& map, const Observable& phi, const Schedule& sched,
                                 const BlockLibrary& lib, std::size_t n_check, std::uint64_t seed,
                                 std::size_t horizon = 4096);

std::string schedule_json(const Schedule& s);

}  // namespace shadowkit
