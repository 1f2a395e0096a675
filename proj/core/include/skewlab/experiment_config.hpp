#pragma once

#include "skewlab/fv_solver.hpp"
#include "skewlab/medium.hpp"
#include "skewlab/path_engine.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace skewlab {

enum class CheckKind {
    splitting_probability,
    jump_ratio,
    occupation_ratio,
    duality,
    conservation,
    continuity_probe,
};

[[nodiscard]] const char* to_string(CheckKind kind) noexcept;
/// Throws ConfigError naming the registered kinds.
[[nodiscard]] CheckKind parse_check_kind(const std::string& text);
/// Used when a check entry has no "tolerance".
[[nodiscard]] double default_tolerance(CheckKind kind) noexcept;

struct CheckSpec {
    CheckKind kind = CheckKind::splitting_probability;
    std::string name;
    double tolerance = 0.0;
    std::size_t interface_index = 0;
};

struct EngineSettings {
    double h = 0.01;
    double t = 0.25;
    std::size_t paths = 10000;
    std::uint64_t seed = 1;
    HoldingMode mode = HoldingMode::fixed;
    double start = 0.0;
    unsigned threads = 1;
};

struct EstimatorSettings {
    std::vector<double> epsilons;  // empty: {8h, 4h, 2h}
    std::vector<double> probes;
};

struct SolverSettings {
    std::size_t cells = 2000;
    double dt = 1e-4;
    Scheme scheme = Scheme::implicit_euler;
    std::size_t conservation_steps = 10000;
};

struct ExperimentPlan {
    std::string name;
    EngineSettings engine;
    EstimatorSettings estimator;
    SolverSettings solver;
    std::vector<CheckSpec> checks;

    [[nodiscard]] std::vector<double> epsilons() const;
};

struct ParsedConfig {
    MediumSpec medium;
    std::optional<ExperimentPlan> plan;  // present when the file has an "experiment" section
};

/// Parse and validate a config file. The medium must validate cleanly
/// (ConfigError carrying the violation report otherwise); unknown keys are
/// rejected at every level. The plan name defaults to the file stem.
[[nodiscard]] ParsedConfig parse_config(const std::string& path);
[[nodiscard]] ParsedConfig parse_config_text(const std::string& text, const std::string& default_name);

}  // namespace skewlab
