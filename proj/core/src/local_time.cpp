#include "skewlab/local_time.hpp"

#include "skewlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace skewlab {
namespace {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    [[nodiscard]] double overlap(const Interval& o) const { return std::max(0.0, std::min(hi, o.hi) - std::max(lo, o.lo)); }
};

Interval dual_cell(const Grid& grid, std::size_t k) {
    return {grid.nodes[k] - 0.5 * grid.spacing_left(k), grid.nodes[k] + 0.5 * grid.spacing_right(k)};
}

void require_decreasing(const std::vector<double>& eps) {
    if (eps.empty()) throw UsageError("local time estimate: need at least one epsilon");
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0)) throw UsageError("local time estimate: epsilons must be positive");
        if (i > 0 && !(eps[i] < eps[i - 1])) throw UsageError("local time estimate: epsilons must be decreasing");
    }
}

/// Least-squares weights w with a = sum w_i v_i for the fit v = a + b c.
std::vector<double> intercept_weights(const std::vector<double>& offsets) {
    const std::size_t n = offsets.size();
    if (n == 1) return {1.0};
    double sc = 0.0;
    double scc = 0.0;
    for (double c : offsets) {
        sc += c;
        scc += c * c;
    }
    const double det = static_cast<double>(n) * scc - sc * sc;
    if (std::abs(det) <= 1e-300) throw NumericalError("local time extrapolation: window offsets are degenerate");
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = (scc - offsets[i] * sc) / det;
    return w;
}

LocalTimeEstimate estimate_with_weight(const PathEnsemble& ensemble, const Grid& grid, double x, Side side,
                                       const std::vector<double>& epsilons, const NodeWeight& weight,
                                       LocalTimeNotion notion) {
    require_decreasing(epsilons);
    LocalTimeEstimate est;
    est.x = x;
    est.side = side;
    est.notion = notion;
    est.epsilons = epsilons;

    std::vector<WindowOccupation> windows;
    std::vector<double> offsets;
    windows.reserve(epsilons.size());
    for (double eps : epsilons) {
        windows.push_back(window_occupation(ensemble, grid, x, side, eps, weight));
        auto& w = windows.back();
        const double inv = 1.0 / w.covered;
        for (double& v : w.per_path) v *= inv;
        w.mean *= inv;
        w.std_error *= inv;
        est.values.push_back(w.mean);
        est.std_errors.push_back(w.std_error);
        offsets.push_back(w.center_offset);
    }

    const auto coef = intercept_weights(offsets);
    const std::size_t n_paths = ensemble.path_count();
    est.per_path.assign(n_paths, 0.0);
    for (std::size_t i = 0; i < windows.size(); ++i) {
        for (std::size_t p = 0; p < n_paths; ++p) est.per_path[p] += coef[i] * windows[i].per_path[p];
    }
    const auto m = sample_mean(est.per_path);
    est.value = m.mean;
    est.std_error = m.std_error;
    return est;
}

double quantile(std::vector<double>& sorted_values, double q) {
    if (sorted_values.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted_values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted_values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted_values[lo] * (1.0 - frac) + sorted_values[hi] * frac;
}

/// Multiplier taking nlt to the given notion at (x, side).
double notion_factor(LocalTimeNotion notion, const ScaleSpeed& scale, double x, Side side) {
    switch (notion) {
        case LocalTimeNotion::nlt: return 1.0;
        case LocalTimeNotion::smlt: return scale.densities_at(x, side).qv_rate;
        case LocalTimeNotion::dlt: return 1.0 / scale.densities_at(x, side).m_prime;
    }
    throw UsageError("unknown local time notion");
}

}  // namespace

const char* to_string(LocalTimeNotion notion) noexcept {
    switch (notion) {
        case LocalTimeNotion::nlt: return "nlt";
        case LocalTimeNotion::smlt: return "smlt";
        case LocalTimeNotion::dlt: return "dlt";
    }
    return "?";
}

LocalTimeNotion parse_notion(const std::string& text) {
    if (text == "nlt") return LocalTimeNotion::nlt;
    if (text == "smlt") return LocalTimeNotion::smlt;
    if (text == "dlt") return LocalTimeNotion::dlt;
    throw ConfigError("unknown local time notion '" + text + "'");
}

WindowOccupation window_occupation(const PathEnsemble& ensemble, const Grid& grid, double x, Side side,
                                   double epsilon, const NodeWeight& weight) {
    if (!(epsilon > 0.0)) throw UsageError("window_occupation: epsilon must be positive");
    if (ensemble.node_count() != grid.size()) throw UsageError("window_occupation: ensemble and grid differ");
    const Interval window = side == Side::right ? Interval{x, x + epsilon} : Interval{x - epsilon, x};

    for (std::size_t idx : grid.interface_nodes) {
        const double xi = grid.nodes[idx];
        if (xi > window.lo && xi < window.hi) {
            throw UsageError("window_occupation: window around " + std::to_string(x) + " straddles the interface at " +
                             std::to_string(xi) + "; probe each side separately");
        }
    }

    std::vector<std::pair<std::size_t, double>> nodes;  // (node, weight)
    double covered = 0.0;
    double skipped = 0.0;
    auto lo_it = std::lower_bound(grid.nodes.begin(), grid.nodes.end(), window.lo - grid.target_spacing * 4.0);
    for (auto k = static_cast<std::size_t>(lo_it - grid.nodes.begin()); k < grid.size(); ++k) {
        const Interval cell = dual_cell(grid, k);
        if (cell.lo >= window.hi) break;
        const double ov = cell.overlap(window);
        if (ov <= 0.0) continue;
        if (grid.is_interface_node(k)) {
            if (grid.nodes[k] == x) {
                skipped += ov;
                continue;
            }
            throw UsageError("window_occupation: window reaches into the dual cell of the interface at " +
                             std::to_string(grid.nodes[k]));
        }
        const double cell_len = cell.hi - cell.lo;
        const double w = (ov / cell_len) * (weight ? weight(k) : 1.0);
        nodes.emplace_back(k, w);
        covered += ov;
    }
    if (nodes.empty() || covered <= 0.0) {
        throw UsageError("window_occupation: no grid node inside the window around " + std::to_string(x));
    }

    WindowOccupation out;
    out.covered = covered;
    out.center_offset = skipped + 0.5 * covered;
    out.per_path.assign(ensemble.path_count(), 0.0);
    const std::size_t first_k = nodes.front().first;
    const std::size_t last_k = nodes.back().first;
    for (std::size_t p = 0; p < ensemble.path_count(); ++p) {
        const auto [first, occ] = ensemble.path_occupation(p);
        const std::size_t end = first + occ.size();
        if (end <= first_k || first > last_k) continue;
        double sum = 0.0;
        for (const auto& [k, w] : nodes) {
            if (k >= first && k < end) sum += w * occ[k - first];
        }
        out.per_path[p] = sum;
    }
    const auto m = sample_mean(out.per_path);
    out.mean = m.mean;
    out.std_error = m.std_error;
    return out;
}

LocalTimeEstimate nlt_estimate(const PathEnsemble& ensemble, const Grid& grid, double x, Side side,
                               const std::vector<double>& epsilons) {
    return estimate_with_weight(ensemble, grid, x, side, epsilons, {}, LocalTimeNotion::nlt);
}

LocalTimeEstimate smlt_direct_estimate(const PathEnsemble& ensemble, const Grid& grid, const ScaleSpeed& scale,
                                       double x, Side side, const std::vector<double>& epsilons) {
    // Tallied nodes are never interface nodes, so either side gives the same q there.
    const NodeWeight q = [&](std::size_t k) { return scale.densities_at(grid.nodes[k], side).qv_rate; };
    return estimate_with_weight(ensemble, grid, x, side, epsilons, q, LocalTimeNotion::smlt);
}

LocalTimeEstimate convert_lt(const LocalTimeEstimate& est, LocalTimeNotion target, const ScaleSpeed& scale) {
    const double factor =
        notion_factor(target, scale, est.x, est.side) / notion_factor(est.notion, scale, est.x, est.side);
    LocalTimeEstimate out = est;
    out.notion = target;
    for (double& v : out.values) v *= factor;
    for (double& v : out.std_errors) v *= factor;
    for (double& v : out.per_path) v *= factor;
    out.value *= factor;
    out.std_error *= factor;
    return out;
}

std::vector<double> default_epsilons(double h) { return {8.0 * h, 4.0 * h, 2.0 * h}; }

double predicted_ratio(const Medium& medium, std::size_t j) {
    const double x = medium.interface_position(j);
    const auto minus = medium.coeff(x, Side::left);
    const auto plus = medium.coeff(x, Side::right);
    const double lam = medium.lambda(j);
    return (plus.capacity / minus.capacity) * (minus.diffusion / plus.diffusion) * (lam / (1.0 - lam));
}

double cross_section_ratio(const Medium& medium, std::size_t j) {
    const double x = medium.interface_position(j);
    return medium.capacity(x, Side::right) / medium.capacity(x, Side::left) / medium.beta_ratio(j);
}

JumpRatioReport estimate_ratio(const PathEnsemble& ensemble, const Grid& grid, const Medium& medium, std::size_t j,
                               const std::vector<double>& epsilons) {
    if (j >= medium.interface_count()) throw UsageError("estimate_ratio: no interface " + std::to_string(j));
    JumpRatioReport rep;
    rep.interface_x = medium.interface_position(j);
    rep.predicted = predicted_ratio(medium, j);
    rep.epsilons = epsilons;
    rep.left = nlt_estimate(ensemble, grid, rep.interface_x, Side::left, epsilons);
    rep.right = nlt_estimate(ensemble, grid, rep.interface_x, Side::right, epsilons);
    if (!(rep.left.value > 0.0) || std::any_of(rep.left.values.begin(), rep.left.values.end(),
                                                [](double v) { return !(v > 0.0); })) {
        throw NumericalError("estimate_ratio: left side of interface " + std::to_string(rep.interface_x) +
                             " has zero occupation; ratio undefined");
    }
    for (std::size_t i = 0; i < epsilons.size(); ++i) rep.ratio_per_epsilon.push_back(rep.right.values[i] / rep.left.values[i]);
    rep.estimated = rep.right.value / rep.left.value;

    // Delta method on the paired per-path extrapolations.
    std::vector<double> lin(ensemble.path_count());
    for (std::size_t p = 0; p < lin.size(); ++p) {
        lin[p] = (rep.right.per_path[p] - rep.estimated * rep.left.per_path[p]) / rep.left.value;
    }
    rep.std_error = sample_mean(lin).std_error;
    rep.half_width = 3.0 * rep.std_error;

    // Per-path ratios at the widest window.
    const auto wl = window_occupation(ensemble, grid, rep.interface_x, Side::left, epsilons.front());
    const auto wr = window_occupation(ensemble, grid, rep.interface_x, Side::right, epsilons.front());
    std::vector<double> ratios;
    for (std::size_t p = 0; p < wl.per_path.size(); ++p) {
        if (wl.per_path[p] > 0.0) ratios.push_back((wr.per_path[p] / wr.covered) / (wl.per_path[p] / wl.covered));
    }
    std::sort(ratios.begin(), ratios.end());
    rep.per_path_count = ratios.size();
    rep.per_path_q25 = quantile(ratios, 0.25);
    rep.per_path_median = quantile(ratios, 0.5);
    rep.per_path_q75 = quantile(ratios, 0.75);
    rep.per_path_ratios = std::move(ratios);
    return rep;
}

std::vector<HistogramBin> log_histogram(const std::vector<double>& values, std::size_t bins) {
    if (bins == 0) throw UsageError("log_histogram: need at least one bin");
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (double v : values) {
        if (v > 0.0) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!(hi > 0.0)) return {};
    if (hi == lo) return {{lo, hi, static_cast<std::size_t>(std::count(values.begin(), values.end(), lo))}};
    const double llo = std::log(lo);
    const double step = (std::log(hi) - llo) / static_cast<double>(bins);
    std::vector<HistogramBin> out(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out[b].lo = std::exp(llo + step * static_cast<double>(b));
        out[b].hi = b + 1 == bins ? hi : std::exp(llo + step * static_cast<double>(b + 1));
    }
    out.front().lo = lo;
    for (double v : values) {
        if (!(v > 0.0)) continue;
        auto b = static_cast<std::size_t>((std::log(v) - llo) / step);
        ++out[std::min(b, bins - 1)].count;
    }
    return out;
}

ContinuityProbe continuity_probe(const PathEnsemble& ensemble, const Grid& grid, const ScaleSpeed& scale, double x,
                                 const std::vector<double>& epsilons, bool normalize_by_speed) {
    auto left = nlt_estimate(ensemble, grid, x, Side::left, epsilons);
    auto right = nlt_estimate(ensemble, grid, x, Side::right, epsilons);
    if (normalize_by_speed) {
        left = convert_lt(left, LocalTimeNotion::dlt, scale);
        right = convert_lt(right, LocalTimeNotion::dlt, scale);
    }
    ContinuityProbe out;
    out.x = x;
    out.left = left.value;
    out.right = right.value;
    out.difference = right.value - left.value;
    std::vector<double> diff(left.per_path.size());
    for (std::size_t p = 0; p < diff.size(); ++p) diff[p] = right.per_path[p] - left.per_path[p];
    out.std_error = sample_mean(diff).std_error;
    return out;
}

}  // namespace skewlab
