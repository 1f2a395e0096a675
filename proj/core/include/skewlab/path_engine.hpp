#pragma once

#include "skewlab/chain.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace skewlab {

enum class HoldingMode {
    fixed,        // hold exactly tau(k); weak approximation, lower variance
    exponential,  // hold Exp(mean tau(k)); continuous-time Markov chain
};

[[nodiscard]] const char* to_string(HoldingMode mode) noexcept;
/// Accepts "fixed" and "exp"/"exponential"; throws ConfigError otherwise.
[[nodiscard]] HoldingMode parse_holding_mode(const std::string& text);

struct SimulationOptions {
    HoldingMode mode = HoldingMode::fixed;
    /// Keep per-path occupation (needed by the local-time estimators).
    bool keep_path_occupation = true;
    /// Record full (node, holding time) traces for the first N paths.
    std::size_t trace_paths = 0;
    unsigned threads = 1;
};

/// One simulated path, as handed to PathEnsemble::append.
struct PathRecord {
    std::size_t first_node = 0;      // node index of occupation[0]
    std::vector<double> occupation;  // time spent at nodes first_node, first_node + 1, ...
    std::size_t final_node = 0;      // node held at the horizon
    bool touched_boundary = false;
};

/// Simulated trajectories summarised by per-path occupation and per-node tallies.
class PathEnsemble {
public:
    PathEnsemble() = default;
    PathEnsemble(std::size_t node_count, double horizon, std::size_t start_node, std::uint64_t seed,
                 HoldingMode mode, double grid_spacing);

    /// Adds a path; aggregates are updated in call order.
    void append(const PathRecord& record, bool keep_occupation = true);
    void add_visits(std::span<const std::uint64_t> visits);

    [[nodiscard]] std::size_t path_count() const noexcept { return final_node_.size(); }
    [[nodiscard]] std::size_t node_count() const noexcept { return total_occupation_.size(); }
    [[nodiscard]] double horizon() const noexcept { return horizon_; }
    [[nodiscard]] std::size_t start_node() const noexcept { return start_node_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] HoldingMode mode() const noexcept { return mode_; }
    [[nodiscard]] double grid_spacing() const noexcept { return grid_spacing_; }
    [[nodiscard]] bool has_path_occupation() const noexcept { return has_path_occupation_; }

    [[nodiscard]] std::size_t final_node(std::size_t path) const { return final_node_.at(path); }
    [[nodiscard]] const std::vector<std::uint32_t>& final_nodes() const noexcept { return final_node_; }
    [[nodiscard]] bool touched_boundary(std::size_t path) const { return touched_boundary_.at(path) != 0; }
    /// Fraction of paths that visited either window bound.
    [[nodiscard]] double boundary_fraction() const;

    [[nodiscard]] const std::vector<double>& total_occupation() const noexcept { return total_occupation_; }
    [[nodiscard]] const std::vector<std::uint64_t>& visit_count() const noexcept { return visit_count_; }

    /// First node of the stored occupation range of a path and the values.
    [[nodiscard]] std::pair<std::size_t, std::span<const double>> path_occupation(std::size_t path) const;
    [[nodiscard]] double occupation_at(std::size_t path, std::size_t node) const;

    std::vector<std::vector<std::pair<std::uint32_t, double>>> traces;

private:
    std::size_t node_count_ = 0;
    double horizon_ = 0.0;
    std::size_t start_node_ = 0;
    std::uint64_t seed_ = 0;
    HoldingMode mode_ = HoldingMode::fixed;
    double grid_spacing_ = 0.0;
    bool has_path_occupation_ = true;

    std::vector<std::uint32_t> final_node_;
    std::vector<std::uint8_t> touched_boundary_;
    std::vector<double> total_occupation_;
    std::vector<std::uint64_t> visit_count_;
    std::vector<std::size_t> occ_offset_{0};
    std::vector<std::uint32_t> occ_first_;
    std::vector<double> occ_values_;
};

/// Simulate n_paths trajectories of the chain up to `horizon`.
///
/// Path i uses the random stream (seed, i), so the result is identical for any
/// thread count. Throws UsageError if `start` is not a grid node.
[[nodiscard]] PathEnsemble simulate_paths(const ChainModel& chain, double start, double horizon,
                                          std::size_t n_paths, std::uint64_t seed,
                                          const SimulationOptions& options = {});

/// Absorption experiment on (lower, upper).
struct ExitSample {
    std::size_t paths = 0;
    std::size_t hits_upper = 0;
    double mean_time = 0.0;
    double time_stderr = 0.0;

    [[nodiscard]] double upper_fraction() const noexcept {
        return paths ? static_cast<double>(hits_upper) / static_cast<double>(paths) : 0.0;
    }
    [[nodiscard]] double upper_fraction_stderr() const noexcept;
};

/// Run the chain from `start` until it hits `lower` or `upper` (all grid nodes).
[[nodiscard]] ExitSample simulate_exit(const ChainModel& chain, double start, double lower, double upper,
                                       std::size_t n_paths, std::uint64_t seed,
                                       HoldingMode mode = HoldingMode::fixed, unsigned threads = 1);

/// Mean and standard error of a per-path statistic.
struct SampleMean {
    double mean = 0.0;
    double std_error = 0.0;
};

[[nodiscard]] SampleMean sample_mean(std::span<const double> values);

/// Per-path f(X_t) - f(X_0) - sum_k occupation_k * generator_nodes[k].
[[nodiscard]] std::vector<double> dynkin_residuals(const PathEnsemble& ensemble, std::span<const double> f_nodes,
                                                   std::span<const double> generator_nodes);

}  // namespace skewlab
