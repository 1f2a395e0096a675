#pragma once

#include "skewlab/medium.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace skewlab {

/// Node set for the path engine. Every interface and both window bounds are nodes;
/// spacing is uniform inside each piece.
struct Grid {
    std::vector<double> nodes;
    std::vector<std::size_t> interface_nodes;  // node index of interface j
    double target_spacing = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
    [[nodiscard]] double spacing_left(std::size_t k) const { return k == 0 ? 0.0 : nodes[k] - nodes[k - 1]; }
    [[nodiscard]] double spacing_right(std::size_t k) const {
        return k + 1 >= nodes.size() ? 0.0 : nodes[k + 1] - nodes[k];
    }
    [[nodiscard]] bool is_interface_node(std::size_t k) const;
    /// Index of the node at x (to within 1e-9 relative), if any.
    [[nodiscard]] std::optional<std::size_t> node_index(double x) const;
};

/// Per piece: ceil(length / h) equal subintervals. Throws UsageError when h <= 0
/// or h exceeds the narrowest piece.
[[nodiscard]] Grid build_grid(const Medium& medium, double h);

}  // namespace skewlab
