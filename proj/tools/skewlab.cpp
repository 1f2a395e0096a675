// skewlab command line: validate media, simulate chains, estimate local times,
// solve the forward equation and run check plans.

#include "skewlab/chain.hpp"
#include "skewlab/checks.hpp"
#include "skewlab/csv.hpp"
#include "skewlab/error.hpp"
#include "skewlab/experiment_config.hpp"
#include "skewlab/fv_solver.hpp"
#include "skewlab/grid.hpp"
#include "skewlab/local_time.hpp"
#include "skewlab/medium.hpp"
#include "skewlab/medium_json.hpp"
#include "skewlab/path_engine.hpp"
#include "skewlab/scale_speed.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace skewlab;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Globals {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

struct SimulateArgs {
    std::optional<double> h;
    std::optional<double> t;
    std::optional<std::size_t> paths;
    std::optional<double> start;
    std::optional<std::string> mode;
    std::size_t trace = 0;
    std::string ensemble_out;
};

struct EstimateArgs {
    std::string ensemble;
    std::string histogram;
    std::vector<double> at;
    std::vector<double> eps;
    std::string notion = "all";
};

struct PdeArgs {
    std::optional<double> t;
    std::optional<std::size_t> cells;
    std::optional<double> dt;
    std::string init;
    std::optional<std::string> scheme;
};

ParsedConfig load(const Globals& g) {
    if (g.config.empty()) throw ConfigError("--config is required");
    return parse_config(g.config);
}

ExperimentPlan plan_or_default(const ParsedConfig& cfg, const Globals& g) {
    ExperimentPlan plan = cfg.plan.value_or(ExperimentPlan{});
    if (plan.name.empty()) plan.name = std::filesystem::path(g.config).stem().string();
    if (g.seed) plan.engine.seed = *g.seed;
    plan.engine.threads = g.threads;
    return plan;
}

EngineSettings engine_settings(const ExperimentPlan& plan, const SimulateArgs& a) {
    EngineSettings e = plan.engine;
    if (a.h) e.h = *a.h;
    if (a.t) e.t = *a.t;
    if (a.paths) e.paths = *a.paths;
    if (a.start) e.start = *a.start;
    if (a.mode) e.mode = parse_holding_mode(*a.mode);
    return e;
}

int cmd_validate(const Globals& g) {
    if (g.config.empty()) throw ConfigError("--config is required");
    const auto doc = load_json_file(g.config);
    const auto spec = medium_from_json(doc, {"experiment"});
    const auto report = validate_model(spec);
    if (!report.ok()) {
        std::cerr << report.summary() << '\n';
        return kExitConfig;
    }
    const Medium medium(spec);
    CsvWriter csv(std::cout);
    csv.header({"interface", "x", "lambda", "phi_left", "phi_right"});
    for (std::size_t j = 0; j < medium.interface_count(); ++j) {
        csv.row(j, medium.interface_position(j), medium.lambda(j), medium.phi_of_piece(j), medium.phi_of_piece(j + 1));
    }
    std::cerr << "valid: " << medium.interface_count() << " interfaces, lambda decay sum "
              << format_double(report.lambda_decay_sum)
              << (report.capacity_continuous ? "" : ", capacity jumps at an interface") << '\n';
    return kExitPass;
}

int cmd_tabulate(const Globals& g, std::size_t points) {
    const auto cfg = load(g);
    const ScaleSpeed scale{Medium(cfg.medium)};
    const auto w = cfg.medium.window;
    std::vector<double> xs;
    const std::size_t n = std::max<std::size_t>(points, 2);
    for (std::size_t i = 0; i < n; ++i) xs.push_back(w.lo + (w.hi - w.lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    for (const auto& itf : cfg.medium.interfaces) xs.push_back(itf.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    CsvWriter csv(std::cout);
    csv.header({"x", "s_prime_left", "s_prime_right", "m_prime_left", "m_prime_right", "s"});
    for (double x : xs) {
        const auto l = scale.densities_at(x, Side::left);
        const auto r = scale.densities_at(x, Side::right);
        csv.row(x, l.s_prime, r.s_prime, l.m_prime, r.m_prime, scale.scale_value(x));
    }
    return kExitPass;
}

int cmd_simulate(const Globals& g, const SimulateArgs& a) {
    const auto cfg = load(g);
    const auto plan = plan_or_default(cfg, g);
    const auto e = engine_settings(plan, a);
    const Medium medium(cfg.medium);
    const ScaleSpeed scale(medium);
    const auto chain = chain_parameters(scale, build_grid(medium, e.h));
    SimulationOptions opts;
    opts.mode = e.mode;
    opts.threads = g.threads;
    opts.trace_paths = a.trace;
    opts.keep_path_occupation = !a.ensemble_out.empty();
    const auto ensemble = simulate_paths(chain, e.start, e.t, e.paths, e.seed, opts);

    write_node_summary(std::cout, ensemble, chain.grid.nodes);
    if (!a.ensemble_out.empty()) {
        auto out = open_output(a.ensemble_out);
        write_ensemble(out, ensemble);
    }
    if (a.trace > 0) {
        const auto path = (std::filesystem::path(g.out) / plan.name / "traces.csv").string();
        auto out = open_output(path);
        CsvWriter csv(out);
        csv.header({"path", "node_index", "holding_time"});
        for (std::size_t p = 0; p < ensemble.traces.size(); ++p) {
            for (const auto& [node, hold] : ensemble.traces[p]) csv.row(p, node, hold);
        }
        std::cerr << "traces written to " << path << '\n';
    }
    std::cerr << "paths=" << ensemble.path_count() << " boundary_fraction=" << format_double(ensemble.boundary_fraction())
              << '\n';
    return kExitPass;
}

struct LoadedEnsemble {
    Medium medium;
    ScaleSpeed scale;
    Grid grid;
    PathEnsemble ensemble;
    std::vector<double> epsilons;
};

LoadedEnsemble ensemble_for(const Globals& g, const EstimateArgs& a) {
    const auto cfg = load(g);
    const auto plan = plan_or_default(cfg, g);
    Medium medium(cfg.medium);
    ScaleSpeed scale(medium);
    PathEnsemble ensemble;
    double h = plan.engine.h;
    if (!a.ensemble.empty()) {
        std::ifstream in(a.ensemble, std::ios::binary);
        if (!in) throw ConfigError("cannot open ensemble file '" + a.ensemble + "'");
        ensemble = read_ensemble(in, a.ensemble);
        h = ensemble.grid_spacing();
    }
    Grid grid = build_grid(medium, h);
    if (a.ensemble.empty()) {
        const auto chain = chain_parameters(scale, grid);
        SimulationOptions opts;
        opts.mode = plan.engine.mode;
        opts.threads = g.threads;
        ensemble = simulate_paths(chain, plan.engine.start, plan.engine.t, plan.engine.paths, plan.engine.seed, opts);
    } else if (grid.size() != ensemble.node_count()) {
        throw ConfigError("ensemble has " + std::to_string(ensemble.node_count()) + " nodes but the config grid has " +
                          std::to_string(grid.size()));
    }
    std::vector<double> eps = a.eps.empty() ? plan.estimator.epsilons : a.eps;
    if (eps.empty()) eps = default_epsilons(h);
    return {std::move(medium), std::move(scale), std::move(grid), std::move(ensemble), std::move(eps)};
}

int cmd_localtime(const Globals& g, const EstimateArgs& a) {
    auto le = ensemble_for(g, a);
    std::vector<LocalTimeNotion> notions;
    if (a.notion == "all") {
        notions = {LocalTimeNotion::nlt, LocalTimeNotion::smlt, LocalTimeNotion::dlt};
    } else {
        notions = {parse_notion(a.notion)};
    }
    std::vector<double> points = a.at;
    if (points.empty()) points = le.medium.interface_positions();
    if (points.empty()) throw UsageError("localtime: give --at (the medium has no interfaces)");
    CsvWriter csv(std::cout);
    csv.header({"x", "side", "epsilon", "notion", "value", "stderr"});
    for (double x : points) {
        for (Side side : {Side::left, Side::right}) {
            const auto nlt = nlt_estimate(le.ensemble, le.grid, x, side, le.epsilons);
            for (auto notion : notions) {
                const auto est = convert_lt(nlt, notion, le.scale);
                for (std::size_t i = 0; i < est.epsilons.size(); ++i) {
                    csv.row(x, to_string(side), est.epsilons[i], to_string(notion), est.values[i], est.std_errors[i]);
                }
                csv.row(x, to_string(side), 0.0, to_string(notion), est.value, est.std_error);
            }
        }
    }
    return kExitPass;
}

int cmd_ratio(const Globals& g, const EstimateArgs& a) {
    auto le = ensemble_for(g, a);
    if (le.medium.interface_count() == 0) throw UsageError("ratio: the medium has no interfaces");
    CsvWriter csv(std::cout);
    csv.header({"x_j", "predicted", "estimated", "half_width"});
    std::vector<std::pair<double, std::vector<HistogramBin>>> histogram_rows;
    for (std::size_t j = 0; j < le.medium.interface_count(); ++j) {
        const auto rep = estimate_ratio(le.ensemble, le.grid, le.medium, j, le.epsilons);
        csv.row(rep.interface_x, rep.predicted, rep.estimated, rep.half_width);
        std::cerr << "x_j=" << format_double(rep.interface_x) << " per-path ratios: n=" << rep.per_path_count
                  << " q25=" << format_double(rep.per_path_q25) << " median=" << format_double(rep.per_path_median)
                  << " q75=" << format_double(rep.per_path_q75) << '\n';
        if (!a.histogram.empty()) histogram_rows.emplace_back(rep.interface_x, log_histogram(rep.per_path_ratios, 40));
    }
    if (!a.histogram.empty()) {
        auto out = open_output(a.histogram);
        CsvWriter hist(out);
        hist.header({"x_j", "bin_lo", "bin_hi", "count"});
        for (const auto& [x, bins] : histogram_rows) {
            for (const auto& b : bins) hist.row(x, b.lo, b.hi, b.count);
        }
    }
    return kExitPass;
}

std::vector<double> read_u_column(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open initial data file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
    std::vector<std::string> cols;
    {
        std::istringstream hs(line);
        std::string c;
        while (std::getline(hs, c, ',')) cols.push_back(c);
    }
    const auto it = std::find(cols.begin(), cols.end(), "u");
    if (it == cols.end()) throw ConfigError(path + ": header has no 'u' column");
    const auto col = static_cast<std::size_t>(it - cols.begin());
    std::vector<double> u;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        for (std::size_t i = 0; i <= col; ++i) {
            if (!std::getline(ls, cell, ',')) throw ConfigError(path + ": short row at line " + std::to_string(line_no));
        }
        try {
            u.push_back(std::stod(cell));
        } catch (const std::logic_error&) {
            throw ConfigError(path + ": bad number at line " + std::to_string(line_no));
        }
    }
    return u;
}

int cmd_pde(const Globals& g, const PdeArgs& a) {
    const auto cfg = load(g);
    const auto plan = plan_or_default(cfg, g);
    const Medium medium(cfg.medium);
    const double t = a.t.value_or(plan.engine.t);
    const std::size_t cells = a.cells.value_or(plan.solver.cells);
    const double dt = a.dt.value_or(plan.solver.dt);
    const Scheme scheme = a.scheme ? parse_scheme(*a.scheme) : plan.solver.scheme;

    InitialData init = DeltaInitial{plan.engine.start};
    if (!a.init.empty()) {
        if (a.init.rfind("delta:", 0) == 0) {
            try {
                init = DeltaInitial{std::stod(a.init.substr(6))};
            } catch (const std::logic_error&) {
                throw ConfigError("--init: bad delta position '" + a.init.substr(6) + "'");
            }
        } else if (a.init.rfind("csv:", 0) == 0) {
            init = TabulatedInitial{read_u_column(a.init.substr(4))};
        } else {
            throw ConfigError("--init must be delta:<x0> or csv:<path>");
        }
    }
    const auto sol = solve_forward(medium, init, t, cells, dt, scheme);
    const auto p = p_from_q(sol);
    CsvWriter csv(std::cout);
    csv.header({"cell_center", "u", "p", "eta"});
    for (std::size_t i = 0; i < sol.system.size(); ++i) {
        csv.row(sol.system.centers[i], sol.field.u[i], p[i], sol.system.eta[i]);
    }
    const double drift = (sol.mass_final - sol.mass_initial) / sol.mass_initial;
    std::cerr << "mass_initial=" << format_double(sol.mass_initial) << ", mass_final=" << format_double(sol.mass_final)
              << ", mass_drift=" << format_double(drift) << '\n';
    return kExitPass;
}

int cmd_check(const Globals& g) {
    const auto cfg = load(g);
    if (!cfg.plan) throw ConfigError("config has no 'experiment' section");
    const auto plan = plan_or_default(cfg, g);
    const auto report = run_checks(cfg.medium, plan, g.out);
    for (const auto& r : report.results) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " predicted=" << format_double(r.predicted)
                  << " observed=" << format_double(r.observed) << " deviation=" << format_double(r.deviation)
                  << " tolerance=" << format_double(r.tolerance) << '\n';
    }
    std::cout << "artifacts: " << report.output_dir << '\n';
    return report.all_passed() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skewlab: diffusion in media with interfaces"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "Medium/experiment JSON file");
    app.add_option("--out", g.out, "Output root directory")->capture_default_str();
    app.add_option("--seed", g.seed, "Override the engine seed");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app.fallthrough();

    auto* validate = app.add_subcommand("validate", "Validate a medium and print interface data");

    std::size_t points = 601;
    auto* tabulate = app.add_subcommand("tabulate-scale", "Tabulate s', m' and s across the window");
    tabulate->add_option("--points", points, "Uniform sample count (interfaces are added)")->capture_default_str();

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate the embedded chain; prints node occupation");
    simulate->set_help_flag("--help", "Print this help message and exit");
    simulate->add_option("--h", sim.h, "Grid spacing");
    simulate->add_option("--t", sim.t, "Horizon");
    simulate->add_option("--paths", sim.paths, "Number of paths");
    simulate->add_option("--start", sim.start, "Start position (a grid node)");
    simulate->add_option("--mode", sim.mode, "Holding mode")->check(CLI::IsMember({"fixed", "exp"}));
    simulate->add_option("--trace", sim.trace, "Dump (node_index, holding_time) for the first N paths");
    simulate->add_option("--ensemble-out", sim.ensemble_out, "Write the per-path ensemble to this file");

    EstimateArgs est;
    auto* localtime = app.add_subcommand("localtime", "Local time estimates at points");
    localtime->add_option("--ensemble", est.ensemble, "Ensemble file (simulated from the config if absent)");
    localtime->add_option("--at", est.at, "Points (default: interfaces)")->delimiter(',');
    localtime->add_option("--eps", est.eps, "Window widths, decreasing")->delimiter(',');
    localtime->add_option("--notion", est.notion, "nlt, smlt, dlt or all")->capture_default_str();

    EstimateArgs rat;
    auto* ratio = app.add_subcommand("ratio", "Jump ratio of natural local time at each interface");
    ratio->add_option("--ensemble", rat.ensemble, "Ensemble file (simulated from the config if absent)");
    ratio->add_option("--eps", rat.eps, "Window widths, decreasing")->delimiter(',');
    ratio->add_option("--histogram", rat.histogram, "Write a log-spaced histogram of per-path ratios");

    PdeArgs pde;
    auto* pde_cmd = app.add_subcommand("pde", "Finite-volume forward solve; prints cell values");
    pde_cmd->add_option("--t", pde.t, "Final time");
    pde_cmd->add_option("--cells", pde.cells, "Cell count");
    pde_cmd->add_option("--dt", pde.dt, "Time step");
    pde_cmd->add_option("--init", pde.init, "delta:<x0> or csv:<path>");
    pde_cmd->add_option("--scheme", pde.scheme, "implicit-euler or crank-nicolson");

    auto* check = app.add_subcommand("check", "Run the plan's checks and write CSV artifacts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitConfig;
    }

    try {
        if (*validate) return cmd_validate(g);
        if (*tabulate) return cmd_tabulate(g, points);
        if (*simulate) return cmd_simulate(g, sim);
        if (*localtime) return cmd_localtime(g, est);
        if (*ratio) return cmd_ratio(g, rat);
        if (*pde_cmd) return cmd_pde(g, pde);
        if (*check) return cmd_check(g);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFail;
    }
    return kExitConfig;
}
