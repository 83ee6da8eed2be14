#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "shadowkit/map.hpp"

namespace shadowkit {

/// Cells [i h, (i+1) h) tiling [0,1]; the last cell is closed at 1.
struct GridPartition {
    double cell_width = 1.0 / 4096.0;
    std::size_t cell_count = 4096;

    explicit GridPartition(double h = 1.0 / 4096.0);

    std::size_t cell_of(double x) const;
    Interval cell(std::size_t i) const;
    double midpoint(std::size_t i) const;
    friend bool operator==(const GridPartition&, const GridPartition&) = default;
};

struct TransitionGraph {
    GridPartition grid;
    double delta = 0.0;
    std::vector<std::vector<std::size_t>> adjacency;
    std::string map_label;

    std::size_t edge_count() const;
};

struct ChainClassSet {
    std::vector<std::vector<std::size_t>> classes;
    std::vector<std::size_t> recurrent_cells;
};

/// Edges i -> j whenever cell j meets the delta-inflation of the exact image of cell i.
TransitionGraph build_transition_graph(const MapSpec& map, const GridPartition& grid, double delta);

/// Strongly connected component index per cell; components numbered in
/// order of their leftmost cell.
std::vector<std::size_t> scc_labels(const TransitionGraph& g);

std::vector<std::size_t> chain_recurrent_cells(const TransitionGraph& g);
ChainClassSet chain_classes(const TransitionGraph& g);

/// True iff cell(x) and cell(y) reach each other.
bool chain_related(const TransitionGraph& g, double x, double y);

/// Cells visited by T^i x for burn_in <= i < burn_in + sample.
std::vector<std::size_t> omega_limit_cells(const MapSpec& map, double x, std::size_t burn_in,
                                           std::size_t sample, const GridPartition& grid);
std::vector<std::size_t> omega_limit_cells(const ExactMap& map, const Rational& x,
                                           std::size_t burn_in, std::size_t sample,
                                           const GridPartition& grid);

struct ClassMatch {
    /// Index into ChainClassSet::classes, or -1 when no class meets the cells.
    long class_index = -1;
    std::size_t overlap = 0;
    bool tie = false;
};

/// Class sharing the most cells with the given cell set.
ClassMatch containing_class(const ChainClassSet& classes, const std::vector<std::size_t>& cells);

/// Smallest interval holding every cell of the class.
Interval hull(const GridPartition& grid, const std::vector<std::size_t>& cells);

std::string edges_csv(const TransitionGraph& g);
std::string classes_json(const ChainClassSet& set, const TransitionGraph& g);

}  // namespace shadowkit
