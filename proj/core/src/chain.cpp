#include "skewlab/chain.hpp"

#include "skewlab/error.hpp"

namespace skewlab {

ChainModel chain_parameters(const ScaleSpeed& scale, const Grid& grid) {
    const std::size_t n = grid.size();
    if (n < 3) throw UsageError("chain_parameters: grid needs at least three nodes");
    const Medium& medium = scale.medium();

    ChainModel chain;
    chain.grid = grid;
    chain.scale.resize(n);
    chain.increments.resize(n - 1);
    chain.p_up.resize(n);
    chain.tau.resize(n);

    for (std::size_t k = 0; k < n; ++k) chain.scale[k] = scale.scale_value(grid.nodes[k]);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        // Both nodes lie in the closure of one piece; pick it from the midpoint.
        const double mid = 0.5 * (grid.nodes[k] + grid.nodes[k + 1]);
        const std::size_t piece = medium.piece_index(mid, Side::right);
        chain.increments[k] = scale.scale_increment_in_piece(piece, grid.nodes[k], grid.nodes[k + 1]);
    }

    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double down = chain.increments[k - 1];
        const double up = chain.increments[k];
        chain.p_up[k] = down / (down + up);
        chain.tau[k] = scale.expected_exit_time(grid.nodes[k - 1], grid.nodes[k + 1], grid.nodes[k]);
    }
    chain.p_up.front() = 1.0;
    chain.p_up.back() = 0.0;
    chain.tau.front() = scale.reflected_exit_time(grid.nodes[0], grid.nodes[1]);
    chain.tau.back() = scale.reflected_exit_time(grid.nodes[n - 1], grid.nodes[n - 2]);
    return chain;
}

std::vector<double> node_generator_values(const ScaleSpeed& scale, const ChainModel& chain,
                                          const SidedFunction& generator_of_f) {
    const auto& y = chain.grid.nodes;
    const std::size_t n = y.size();
    std::vector<double> out(n);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        out[k] = scale.green_integral(y[k - 1], y[k + 1], y[k], generator_of_f) / chain.tau[k];
    }
    out.front() = scale.reflected_green_integral(y[0], y[1], generator_of_f) / chain.tau.front();
    out.back() = scale.reflected_green_integral(y[n - 1], y[n - 2], generator_of_f) / chain.tau.back();
    return out;
}

std::vector<double> discrete_generator(const ChainModel& chain, const std::vector<double>& f_nodes) {
    const std::size_t n = chain.size();
    if (f_nodes.size() != n) throw UsageError("discrete_generator: one value per node required");
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double up = k + 1 < n ? f_nodes[k + 1] : f_nodes[k];
        const double down = k > 0 ? f_nodes[k - 1] : f_nodes[k];
        const double p = chain.p_up[k];
        out[k] = (p * up + (1.0 - p) * down - f_nodes[k]) / chain.tau[k];
    }
    return out;
}

}  // namespace skewlab
