#include "skewlab/grid.hpp"

#include "skewlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace skewlab {

bool Grid::is_interface_node(std::size_t k) const {
    return std::find(interface_nodes.begin(), interface_nodes.end(), k) != interface_nodes.end();
}

std::optional<std::size_t> Grid::node_index(double x) const {
    if (nodes.empty()) return std::nullopt;
    auto it = std::lower_bound(nodes.begin(), nodes.end(), x);
    const double tol = 1e-9 * std::max(1.0, std::abs(x));
    std::optional<std::size_t> best;
    if (it != nodes.end() && std::abs(*it - x) <= tol) best = static_cast<std::size_t>(it - nodes.begin());
    if (it != nodes.begin() && std::abs(*(it - 1) - x) <= tol) {
        const auto prev = static_cast<std::size_t>(it - nodes.begin()) - 1;
        if (!best || std::abs(nodes[prev] - x) < std::abs(nodes[*best] - x)) best = prev;
    }
    return best;
}

Grid build_grid(const Medium& medium, double h) {
    if (!(h > 0.0)) throw UsageError("build_grid: spacing must be positive");
    const auto& pieces = medium.spec().pieces;
    double narrowest = pieces.front().right - pieces.front().left;
    for (const auto& p : pieces) narrowest = std::min(narrowest, p.right - p.left);
    if (h > narrowest) {
        throw UsageError("build_grid: spacing " + std::to_string(h) + " exceeds the narrowest piece (" +
                         std::to_string(narrowest) + ")");
    }

    Grid grid;
    grid.target_spacing = h;
    grid.nodes.push_back(pieces.front().left);
    for (std::size_t j = 0; j < pieces.size(); ++j) {
        const auto& p = pieces[j];
        const double len = p.right - p.left;
        // The small slack keeps lengths that are exact multiples of h from gaining a cell.
        const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / h - 1e-9)));
        for (std::size_t i = 1; i < n; ++i) {
            grid.nodes.push_back(p.left + len * static_cast<double>(i) / static_cast<double>(n));
        }
        grid.nodes.push_back(p.right);
        if (j + 1 < pieces.size()) grid.interface_nodes.push_back(grid.nodes.size() - 1);
    }
    return grid;
}

}  // namespace skewlab
