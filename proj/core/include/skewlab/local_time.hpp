#pragma once

#include "skewlab/grid.hpp"
#include "skewlab/path_engine.hpp"
#include "skewlab/scale_speed.hpp"

#include <string>
#include <vector>

namespace skewlab {

/// nlt: occupation density w.r.t. Lebesgue measure (time/length).
/// smlt: w.r.t. quadratic variation (length). dlt: w.r.t. speed measure (dimensionless).
enum class LocalTimeNotion { nlt, smlt, dlt };

[[nodiscard]] const char* to_string(LocalTimeNotion notion) noexcept;
/// Throws ConfigError for anything but "nlt", "smlt", "dlt".
[[nodiscard]] LocalTimeNotion parse_notion(const std::string& text);

/// Occupation of a one-sided window [x, x + eps] (right) or [x - eps, x] (left).
///
/// Node k contributes the fraction of its dual cell [y_k - h_-/2, y_k + h_+/2]
/// that lies in the window. When x is an interface node its dual cell straddles
/// both sides and is left out; `covered` then excludes that half cell.
struct WindowOccupation {
    double mean = 0.0;
    double std_error = 0.0;
    double covered = 0.0;        // Lebesgue measure of the region actually tallied
    double center_offset = 0.0;  // |midpoint of the tallied region - x|
    std::vector<double> per_path;
};

/// Per-node weight applied on top of the dual-cell fraction (e.g. q for smlt).
using NodeWeight = std::function<double(std::size_t node)>;

/// Throws UsageError if the window holds no node or has an interface in its interior.
[[nodiscard]] WindowOccupation window_occupation(const PathEnsemble& ensemble, const Grid& grid, double x,
                                                 Side side, double epsilon, const NodeWeight& weight = {});

struct LocalTimeEstimate {
    double x = 0.0;
    Side side = Side::right;
    LocalTimeNotion notion = LocalTimeNotion::nlt;
    std::vector<double> epsilons;
    std::vector<double> values;      // raw estimate per epsilon
    std::vector<double> std_errors;  // per epsilon
    double value = 0.0;              // extrapolated to a zero-width window
    double std_error = 0.0;
    std::vector<double> per_path;    // per-path extrapolated values
};

/// Natural local time: window occupation / covered length per epsilon, then a
/// least-squares fit value = a + b * offset extrapolated to offset 0.
[[nodiscard]] LocalTimeEstimate nlt_estimate(const PathEnsemble& ensemble, const Grid& grid, double x, Side side,
                                             const std::vector<double>& epsilons);

/// Semimartingale local time tallied directly: occupation weighted by q(y_k) = D/eta.
[[nodiscard]] LocalTimeEstimate smlt_direct_estimate(const PathEnsemble& ensemble, const Grid& grid,
                                                     const ScaleSpeed& scale, double x, Side side,
                                                     const std::vector<double>& epsilons);

/// nlt = smlt / q = m' * dlt, one-sided values of q and m' at (x, side).
[[nodiscard]] LocalTimeEstimate convert_lt(const LocalTimeEstimate& est, LocalTimeNotion target,
                                           const ScaleSpeed& scale);

/// Default epsilons {8h, 4h, 2h}.
[[nodiscard]] std::vector<double> default_epsilons(double h);

/// [eta(x_j+) / eta(x_j-)] [D(x_j-) / D(x_j+)] [lambda_j / (1 - lambda_j)].
[[nodiscard]] double predicted_ratio(const Medium& medium, std::size_t j);
/// [eta(x_j+) / eta(x_j-)] [beta_j- / beta_j+]; equal to predicted_ratio by construction of lambda.
[[nodiscard]] double cross_section_ratio(const Medium& medium, std::size_t j);

struct JumpRatioReport {
    double interface_x = 0.0;
    double predicted = 0.0;
    double estimated = 0.0;    // extrapolated right / extrapolated left
    double half_width = 0.0;   // 3 delta-method standard errors
    double std_error = 0.0;
    std::vector<double> epsilons;
    std::vector<double> ratio_per_epsilon;
    LocalTimeEstimate left;
    LocalTimeEstimate right;
    /// Quartiles of per-path right/left ratios at the widest window (paths with
    /// positive left occupation only).
    std::size_t per_path_count = 0;
    double per_path_q25 = 0.0;
    double per_path_median = 0.0;
    double per_path_q75 = 0.0;
    std::vector<double> per_path_ratios;  // sorted
};

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
};

/// Log-spaced histogram of positive values over [min, max] of the data.
[[nodiscard]] std::vector<HistogramBin> log_histogram(const std::vector<double>& values, std::size_t bins);

/// Throws NumericalError when the left side was never occupied.
[[nodiscard]] JumpRatioReport estimate_ratio(const PathEnsemble& ensemble, const Grid& grid, const Medium& medium,
                                             std::size_t j, const std::vector<double>& epsilons);

/// Left/right comparison of (optionally m'-normalised) nlt at a point.
struct ContinuityProbe {
    double x = 0.0;
    double left = 0.0;
    double right = 0.0;
    double difference = 0.0;  // right - left
    double std_error = 0.0;   // paired standard error of the difference
};

[[nodiscard]] ContinuityProbe continuity_probe(const PathEnsemble& ensemble, const Grid& grid,
                                               const ScaleSpeed& scale, double x,
                                               const std::vector<double>& epsilons, bool normalize_by_speed);

}  // namespace skewlab
