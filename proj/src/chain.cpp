#include "shadowkit/chain.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "shadowkit/errors.hpp"
#include "shadowkit/intervals.hpp"
#include "shadowkit/parallel.hpp"

namespace shadowkit {

GridPartition::GridPartition(double h) : cell_width(h) {
    if (!(h > 0.0 && h <= 1.0)) throw ParameterError("GridPartition: cell width must be in (0,1]");
    cell_count = std::size_t(std::ceil(1.0 / h));
}

std::size_t GridPartition::cell_of(double x) const {
    if (!(x >= 0.0)) return 0;
    const double f = std::floor(x / cell_width);
    if (f >= double(cell_count)) return cell_count - 1;
    return std::min(std::size_t(f), cell_count - 1);
}

Interval GridPartition::cell(std::size_t i) const {
    return {double(i) * cell_width, std::min(1.0, double(i + 1) * cell_width)};
}

double GridPartition::midpoint(std::size_t i) const {
    const auto c = cell(i);
    return 0.5 * (c.lo + c.hi);
}

std::size_t TransitionGraph::edge_count() const {
    std::size_t e = 0;
    for (const auto& a : adjacency) e += a.size();
    return e;
}

TransitionGraph build_transition_graph(const MapSpec& map, const GridPartition& grid, double delta) {
    if (!(delta >= grid.cell_width))
        throw ParameterError("build_transition_graph: delta " + std::to_string(delta) +
                             " is below the cell width " + std::to_string(grid.cell_width));
    TransitionGraph g{grid, delta, std::vector<std::vector<std::size_t>>(grid.cell_count), map.label()};
    parallel_for(grid.cell_count, [&](std::size_t i) {
        const Interval img = image(map, grid.cell(i));
        const std::size_t lo = grid.cell_of(std::max(0.0, img.lo - delta));
        const std::size_t hi = grid.cell_of(std::min(1.0, img.hi + delta));
        auto& adj = g.adjacency[i];
        adj.reserve(hi - lo + 1);
        for (std::size_t j = lo; j <= hi; ++j) adj.push_back(j);
    });
    return g;
}

std::vector<std::size_t> scc_labels(const TransitionGraph& g) {
    // iterative Tarjan
    const std::size_t n = g.adjacency.size();
    constexpr std::size_t unset = std::size_t(-1);
    std::vector<std::size_t> index(n, unset), low(n, 0), comp(n, unset);
    std::vector<char> on_stack(n, 0);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> call;
    std::size_t counter = 0;
    std::size_t ncomp = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unset) continue;
        call.push_back({root, 0});
        while (!call.empty()) {
            auto& [v, pos] = call.back();
            if (pos == 0 && index[v] == unset) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            const auto& adj = g.adjacency[v];
            if (pos < adj.size()) {
                const std::size_t w = adj[pos++];
                if (index[w] == unset)
                    call.push_back({w, 0});
                else if (on_stack[w])
                    low[v] = std::min(low[v], index[w]);
                continue;
            }
            if (low[v] == index[v]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = ncomp;
                } while (w != v);
                ++ncomp;
            }
            const std::size_t done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
        }
    }
    // renumber by leftmost cell
    std::vector<std::size_t> remap(ncomp, unset);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (remap[comp[i]] == unset) remap[comp[i]] = next++;
    for (auto& c : comp) c = remap[c];
    return comp;
}

namespace {

std::vector<char> recurrent_mask(const TransitionGraph& g, const std::vector<std::size_t>& comp) {
    const std::size_t n = comp.size();
    std::vector<std::size_t> size(n, 0);
    for (auto c : comp) ++size[c];
    std::vector<char> rec(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (size[comp[i]] >= 2) {
            rec[i] = 1;
            continue;
        }
        const auto& adj = g.adjacency[i];
        rec[i] = std::binary_search(adj.begin(), adj.end(), i) ? 1 : 0;
    }
    return rec;
}

}  // namespace

std::vector<std::size_t> chain_recurrent_cells(const TransitionGraph& g) {
    const auto comp = scc_labels(g);
    const auto rec = recurrent_mask(g, comp);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < rec.size(); ++i)
        if (rec[i]) out.push_back(i);
    return out;
}

ChainClassSet chain_classes(const TransitionGraph& g) {
    const auto comp = scc_labels(g);
    const auto rec = recurrent_mask(g, comp);
    ChainClassSet out;
    std::vector<long> slot(comp.size(), -1);
    for (std::size_t i = 0; i < comp.size(); ++i) {
        if (!rec[i]) continue;
        out.recurrent_cells.push_back(i);
        if (slot[comp[i]] < 0) {
            slot[comp[i]] = long(out.classes.size());
            out.classes.emplace_back();
        }
        out.classes[std::size_t(slot[comp[i]])].push_back(i);
    }
    return out;
}

bool chain_related(const TransitionGraph& g, double x, double y) {
    if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
        throw DomainError("chain_related: points must lie in [0,1]");
    const std::size_t cx = g.grid.cell_of(x);
    const std::size_t cy = g.grid.cell_of(y);
    auto reaches = [&](std::size_t from, std::size_t to) {
        // one or more steps, so an isolated non-recurrent cell is not related to itself
        std::vector<char> seen(g.adjacency.size(), 0);
        std::vector<std::size_t> todo{from};
        while (!todo.empty()) {
            const std::size_t v = todo.back();
            todo.pop_back();
            for (std::size_t w : g.adjacency[v]) {
                if (w == to) return true;
                if (!seen[w]) {
                    seen[w] = 1;
                    todo.push_back(w);
                }
            }
        }
        return false;
    };
    return reaches(cx, cy) && reaches(cy, cx);
}

namespace {

template <class Map, class State>
std::vector<std::size_t> visited_cells(const Map& step, State x, std::size_t burn_in,
                                       std::size_t sample, const GridPartition& grid) {
    if (burn_in == 0 || sample == 0) throw ParameterError("omega_limit_cells: burn_in and sample must be >= 1");
    for (std::size_t i = 0; i < burn_in; ++i) x = step(x);
    std::vector<char> hit(grid.cell_count, 0);
    for (std::size_t i = 0; i < sample; ++i) {
        double xd;
        if constexpr (std::is_same_v<State, double>)
            xd = x;
        else
            xd = x.template convert_to<double>();
        hit[grid.cell_of(xd)] = 1;
        if (i + 1 < sample) x = step(x);
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < hit.size(); ++i)
        if (hit[i]) out.push_back(i);
    return out;
}

}  // namespace

std::vector<std::size_t> omega_limit_cells(const MapSpec& map, double x, std::size_t burn_in,
                                           std::size_t sample, const GridPartition& grid) {
    return visited_cells([&](double s) { return eval(map, s); }, x, burn_in, sample, grid);
}

std::vector<std::size_t> omega_limit_cells(const ExactMap& map, const Rational& x,
                                           std::size_t burn_in, std::size_t sample,
                                           const GridPartition& grid) {
    return visited_cells([&](const Rational& s) { return map(s); }, x, burn_in, sample, grid);
}

ClassMatch containing_class(const ChainClassSet& classes, const std::vector<std::size_t>& cells) {
    ClassMatch best;
    std::set<std::size_t> wanted(cells.begin(), cells.end());
    for (std::size_t c = 0; c < classes.classes.size(); ++c) {
        std::size_t overlap = 0;
        for (auto cell : classes.classes[c]) overlap += wanted.count(cell);
        if (overlap == 0) continue;
        if (overlap > best.overlap) {
            best = {long(c), overlap, false};
        } else if (overlap == best.overlap) {
            best.tie = true;
        }
    }
    return best;
}

Interval hull(const GridPartition& grid, const std::vector<std::size_t>& cells) {
    if (cells.empty()) throw ParameterError("hull: empty cell set");
    const auto [lo, hi] = std::minmax_element(cells.begin(), cells.end());
    return {grid.cell(*lo).lo, grid.cell(*hi).hi};
}

std::string edges_csv(const TransitionGraph& g) {
    std::ostringstream os;
    os << "src,dst\n";
    for (std::size_t i = 0; i < g.adjacency.size(); ++i)
        for (auto j : g.adjacency[i]) os << i << "," << j << "\n";
    return os.str();
}

std::string classes_json(const ChainClassSet& set, const TransitionGraph& g) {
    nlohmann::json j;
    j["classes"] = set.classes;
    j["h"] = g.grid.cell_width;
    j["delta"] = g.delta;
    return j.dump();
}

}  // namespace shadowkit
