#include "skewlab/path_engine.hpp"

#include "parallel.hpp"
#include "skewlab/error.hpp"
#include "skewlab/rng.hpp"

#include <algorithm>
#include <cmath>

namespace skewlab {
namespace {

constexpr std::size_t kBlockSize = 512;

double holding_time(HoldingMode mode, double tau, double uniform) {
    if (mode == HoldingMode::fixed) return tau;
    return -tau * std::log1p(-uniform);
}

std::size_t require_node(const Grid& grid, double x, const char* what) {
    const auto idx = grid.node_index(x);
    if (!idx) throw UsageError(std::string(what) + " " + std::to_string(x) + " is not a grid node");
    return *idx;
}

struct BlockResult {
    std::vector<PathRecord> records;
    std::vector<std::uint64_t> visits;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> traces;
};

}  // namespace

const char* to_string(HoldingMode mode) noexcept {
    return mode == HoldingMode::fixed ? "fixed" : "exp";
}

HoldingMode parse_holding_mode(const std::string& text) {
    if (text == "fixed") return HoldingMode::fixed;
    if (text == "exp" || text == "exponential") return HoldingMode::exponential;
    throw ConfigError("unknown holding mode '" + text + "' (expected fixed or exp)");
}

PathEnsemble::PathEnsemble(std::size_t node_count, double horizon, std::size_t start_node, std::uint64_t seed,
                           HoldingMode mode, double grid_spacing)
    : node_count_(node_count),
      horizon_(horizon),
      start_node_(start_node),
      seed_(seed),
      mode_(mode),
      grid_spacing_(grid_spacing),
      total_occupation_(node_count, 0.0),
      visit_count_(node_count, 0) {}

void PathEnsemble::append(const PathRecord& record, bool keep_occupation) {
    if (record.first_node + record.occupation.size() > node_count_ || record.final_node >= node_count_) {
        throw UsageError("PathEnsemble::append: record exceeds the node range");
    }
    final_node_.push_back(static_cast<std::uint32_t>(record.final_node));
    touched_boundary_.push_back(record.touched_boundary ? 1 : 0);
    for (std::size_t i = 0; i < record.occupation.size(); ++i) {
        total_occupation_[record.first_node + i] += record.occupation[i];
    }
    if (!keep_occupation) has_path_occupation_ = false;
    if (has_path_occupation_) {
        occ_first_.push_back(static_cast<std::uint32_t>(record.first_node));
        occ_values_.insert(occ_values_.end(), record.occupation.begin(), record.occupation.end());
        occ_offset_.push_back(occ_values_.size());
    } else {
        occ_first_.clear();
        occ_values_.clear();
        occ_offset_.assign(1, 0);
    }
}

void PathEnsemble::add_visits(std::span<const std::uint64_t> visits) {
    for (std::size_t k = 0; k < std::min(visits.size(), visit_count_.size()); ++k) visit_count_[k] += visits[k];
}

double PathEnsemble::boundary_fraction() const {
    if (touched_boundary_.empty()) return 0.0;
    const auto touched = std::count(touched_boundary_.begin(), touched_boundary_.end(), std::uint8_t{1});
    return static_cast<double>(touched) / static_cast<double>(touched_boundary_.size());
}

std::pair<std::size_t, std::span<const double>> PathEnsemble::path_occupation(std::size_t path) const {
    if (!has_path_occupation_) throw UsageError("ensemble was simulated without per-path occupation");
    const std::size_t begin = occ_offset_.at(path);
    const std::size_t end = occ_offset_.at(path + 1);
    return {occ_first_[path], std::span<const double>(occ_values_.data() + begin, end - begin)};
}

double PathEnsemble::occupation_at(std::size_t path, std::size_t node) const {
    const auto [first, values] = path_occupation(path);
    if (node < first || node >= first + values.size()) return 0.0;
    return values[node - first];
}

PathEnsemble simulate_paths(const ChainModel& chain, double start, double horizon, std::size_t n_paths,
                            std::uint64_t seed, const SimulationOptions& options) {
    if (!(horizon > 0.0)) throw UsageError("simulate_paths: horizon must be positive");
    if (n_paths == 0) throw UsageError("simulate_paths: need at least one path");
    const std::size_t start_node = require_node(chain.grid, start, "simulate_paths: start");
    const std::size_t n = chain.size();
    const std::size_t n_blocks = (n_paths + kBlockSize - 1) / kBlockSize;
    std::vector<BlockResult> blocks(n_blocks);

    detail::parallel_blocks(n_blocks, options.threads, [&](std::size_t b) {
        BlockResult& out = blocks[b];
        out.visits.assign(n, 0);
        std::vector<double> scratch(n, 0.0);
        const std::size_t first_path = b * kBlockSize;
        const std::size_t last_path = std::min(n_paths, first_path + kBlockSize);
        out.records.reserve(last_path - first_path);
        for (std::size_t path = first_path; path < last_path; ++path) {
            const CounterRng rng(seed, path);
            const bool tracing = path < options.trace_paths;
            std::vector<std::pair<std::uint32_t, double>> trace;
            std::size_t k = start_node;
            std::size_t lo = k;
            std::size_t hi = k;
            double elapsed = 0.0;
            for (std::uint64_t step = 0;; ++step) {
                const auto u = rng.uniforms(step);
                const double hold = holding_time(options.mode, chain.tau[k], u[1]);
                ++out.visits[k];
                if (elapsed + hold >= horizon) {
                    scratch[k] += horizon - elapsed;
                    if (tracing) trace.emplace_back(static_cast<std::uint32_t>(k), horizon - elapsed);
                    break;
                }
                scratch[k] += hold;
                if (tracing) trace.emplace_back(static_cast<std::uint32_t>(k), hold);
                elapsed += hold;
                k = u[0] < chain.p_up[k] ? k + 1 : k - 1;
                lo = std::min(lo, k);
                hi = std::max(hi, k);
            }
            PathRecord rec;
            rec.first_node = lo;
            rec.occupation.assign(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
                                  scratch.begin() + static_cast<std::ptrdiff_t>(hi + 1));
            std::fill(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
                      scratch.begin() + static_cast<std::ptrdiff_t>(hi + 1), 0.0);
            rec.final_node = k;
            rec.touched_boundary = lo == 0 || hi + 1 == n;
            out.records.push_back(std::move(rec));
            if (tracing) out.traces.push_back(std::move(trace));
        }
    });

    PathEnsemble ensemble(n, horizon, start_node, seed, options.mode, chain.grid.target_spacing);
    for (auto& block : blocks) {
        for (const auto& rec : block.records) ensemble.append(rec, options.keep_path_occupation);
        ensemble.add_visits(block.visits);
        for (auto& t : block.traces) ensemble.traces.push_back(std::move(t));
        block = BlockResult{};
    }
    return ensemble;
}

double ExitSample::upper_fraction_stderr() const noexcept {
    if (paths == 0) return 0.0;
    const double p = upper_fraction();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(paths));
}

ExitSample simulate_exit(const ChainModel& chain, double start, double lower, double upper, std::size_t n_paths,
                         std::uint64_t seed, HoldingMode mode, unsigned threads) {
    const std::size_t a = require_node(chain.grid, lower, "simulate_exit: lower");
    const std::size_t b = require_node(chain.grid, upper, "simulate_exit: upper");
    const std::size_t x = require_node(chain.grid, start, "simulate_exit: start");
    if (!(a < x && x < b)) throw UsageError("simulate_exit: need lower < start < upper");
    if (n_paths == 0) throw UsageError("simulate_exit: need at least one path");

    const std::size_t n_blocks = (n_paths + kBlockSize - 1) / kBlockSize;
    struct Partial {
        std::size_t hits = 0;
        std::vector<double> times;
    };
    std::vector<Partial> blocks(n_blocks);
    detail::parallel_blocks(n_blocks, threads, [&](std::size_t blk) {
        auto& out = blocks[blk];
        const std::size_t first = blk * kBlockSize;
        const std::size_t last = std::min(n_paths, first + kBlockSize);
        for (std::size_t path = first; path < last; ++path) {
            const CounterRng rng(seed, path);
            std::size_t k = x;
            double elapsed = 0.0;
            for (std::uint64_t step = 0; k != a && k != b; ++step) {
                const auto u = rng.uniforms(step);
                elapsed += holding_time(mode, chain.tau[k], u[1]);
                k = u[0] < chain.p_up[k] ? k + 1 : k - 1;
            }
            if (k == b) ++out.hits;
            out.times.push_back(elapsed);
        }
    });

    ExitSample sample;
    sample.paths = n_paths;
    std::vector<double> times;
    times.reserve(n_paths);
    for (const auto& blk : blocks) {
        sample.hits_upper += blk.hits;
        times.insert(times.end(), blk.times.begin(), blk.times.end());
    }
    const auto m = sample_mean(times);
    sample.mean_time = m.mean;
    sample.time_stderr = m.std_error;
    return sample;
}

SampleMean sample_mean(std::span<const double> values) {
    SampleMean out;
    const std::size_t n = values.size();
    if (n == 0) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(n);
    if (n < 2) return out;
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    return out;
}

std::vector<double> dynkin_residuals(const PathEnsemble& ensemble, std::span<const double> f_nodes,
                                     std::span<const double> generator_nodes) {
    if (f_nodes.size() != ensemble.node_count() || generator_nodes.size() != ensemble.node_count()) {
        throw UsageError("dynkin_residuals: need one f and one Af value per node");
    }
    std::vector<double> out(ensemble.path_count());
    const double f0 = f_nodes[ensemble.start_node()];
    for (std::size_t p = 0; p < out.size(); ++p) {
        const auto [first, occ] = ensemble.path_occupation(p);
        double integral = 0.0;
        for (std::size_t i = 0; i < occ.size(); ++i) integral += occ[i] * generator_nodes[first + i];
        out[p] = f_nodes[ensemble.final_node(p)] - f0 - integral;
    }
    return out;
}

}  // namespace skewlab
