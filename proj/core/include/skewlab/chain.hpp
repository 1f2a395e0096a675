#pragma once

#include "skewlab/grid.hpp"
#include "skewlab/scale_speed.hpp"

#include <vector>

namespace skewlab {

/// Embedded nearest-neighbour chain of the diffusion on a grid.
///
/// From node k the chain moves to k+1 with probability p_up[k] (the scale-exit
/// probability of (y_{k-1}, y_{k+1})) after holding for tau[k] (the mean exit
/// time of that interval). Window bounds reflect: the boundary node always steps
/// inward and its tau is the mean time of the reflected process to reach the
/// neighbouring node.
struct ChainModel {
    Grid grid;
    std::vector<double> scale;       // s(y_k)
    std::vector<double> increments;  // s(y_{k+1}) - s(y_k), integrated inside one piece
    std::vector<double> p_up;
    std::vector<double> tau;

    [[nodiscard]] std::size_t size() const noexcept { return grid.size(); }
};

[[nodiscard]] ChainModel chain_parameters(const ScaleSpeed& scale, const Grid& grid);

/// Per-node Green-weighted average of Af:
///   (1/tau_k) * integral over (y_{k-1}, y_{k+1}) of G(y_k, y) m'(y) Af(y) dy,
/// with the reflected kernel at the two boundary nodes. For f in the generator's
/// domain this equals the chain's discrete generator applied to f.
[[nodiscard]] std::vector<double> node_generator_values(const ScaleSpeed& scale, const ChainModel& chain,
                                                        const SidedFunction& generator_of_f);

/// (p_up f(k+1) + (1 - p_up) f(k-1) - f(k)) / tau_k for node values f.
[[nodiscard]] std::vector<double> discrete_generator(const ChainModel& chain, const std::vector<double>& f_nodes);

}  // namespace skewlab
