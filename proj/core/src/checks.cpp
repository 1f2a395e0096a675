#include "skewlab/checks.hpp"

#include "parallel.hpp"
#include "skewlab/csv.hpp"
#include "skewlab/error.hpp"
#include "skewlab/grid.hpp"
#include "skewlab/local_time.hpp"
#include "skewlab/skew_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>

namespace skewlab {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool uses_paths(CheckKind k) { return k != CheckKind::conservation; }

struct Context {
    const Medium& medium;
    const ScaleSpeed& scale;
    const ExperimentPlan& plan;
    std::optional<ChainModel> chain;
    std::optional<PathEnsemble> ensemble;
    std::optional<ForwardSolution> pde;
};

std::size_t require_interface(const Medium& medium, const CheckSpec& c) {
    if (c.interface_index >= medium.interface_count()) {
        throw ConfigError("interface " + std::to_string(c.interface_index) + " does not exist (medium has " +
                          std::to_string(medium.interface_count()) + ")");
    }
    return c.interface_index;
}

void splitting(const Context& ctx, const CheckSpec& c, CheckResult& r) {
    const std::size_t j = require_interface(ctx.medium, c);
    const double xj = ctx.medium.interface_position(j);
    const std::size_t node = ctx.chain->grid.interface_nodes[j];
    if (ctx.chain->grid.node_index(ctx.plan.engine.start) != node) {
        throw ConfigError("splitting-probability needs engine.start at the interface x=" + std::to_string(xj));
    }
    const auto minus = ctx.medium.coeff(xj, Side::left);
    const auto plus = ctx.medium.coeff(xj, Side::right);
    r.predicted = skew_transmission(minus.diffusion, plus.diffusion, minus.capacity, plus.capacity, 1.0,
                                    1.0 / ctx.medium.beta_ratio(j));
    double above = 0.0;
    for (auto fin : ctx.ensemble->final_nodes()) above += fin > node ? 1.0 : (fin == node ? 0.5 : 0.0);
    const auto n = static_cast<double>(ctx.ensemble->path_count());
    r.observed = above / n;
    const double se = std::sqrt(r.predicted * (1.0 - r.predicted) / n);
    r.deviation = std::abs(r.observed - r.predicted) / se;
}

void jump_ratio(const Context& ctx, const CheckSpec& c, CheckResult& r, bool raw) {
    const std::size_t j = require_interface(ctx.medium, c);
    const auto rep = estimate_ratio(*ctx.ensemble, ctx.chain->grid, ctx.medium, j, ctx.plan.epsilons());
    r.predicted = raw ? cross_section_ratio(ctx.medium, j) : rep.predicted;
    r.observed = raw ? rep.ratio_per_epsilon.back() : rep.estimated;
    r.deviation = std::abs(r.observed / r.predicted - 1.0);
}

void duality(const Context& ctx, CheckResult& r) {
    const auto& sol = *ctx.pde;
    const auto p = p_from_q(sol);
    double pde = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        pde += p[i] * duality_test_function(sol.system.centers[i]) * sol.system.widths[i];
    }
    std::vector<double> values;
    values.reserve(ctx.ensemble->path_count());
    for (auto fin : ctx.ensemble->final_nodes()) values.push_back(duality_test_function(ctx.chain->grid.nodes[fin]));
    const auto mc = sample_mean(values);
    r.predicted = pde;
    r.observed = mc.mean;
    r.deviation = std::abs(pde - mc.mean) / (mc.std_error + kDualityPdeBudget / 3.0);
}

void conservation(const Context& ctx, CheckResult& r) {
    const auto& s = ctx.plan.solver;
    const auto system = assemble_system(ctx.medium, s.cells, s.dt, s.scheme);
    DensityField field;
    field.u.assign(system.size(), 0.0);
    const std::size_t c = system.cell_of(ctx.plan.engine.start);
    field.u[c] = 1.0 / system.widths[c];
    r.predicted = mass(system, field);
    field = advance(system, std::move(field), s.conservation_steps);
    r.observed = mass(system, field);
    r.deviation = std::abs(r.observed - r.predicted) / std::abs(r.predicted);
}

void continuity(const Context& ctx, CheckResult& r) {
    std::vector<ContinuityProbe> probes;
    for (double x : ctx.plan.estimator.probes) {
        probes.push_back(continuity_probe(*ctx.ensemble, ctx.chain->grid, ctx.scale, x, ctx.plan.epsilons(), false));
    }
    for (double x : ctx.medium.interface_positions()) {
        probes.push_back(continuity_probe(*ctx.ensemble, ctx.chain->grid, ctx.scale, x, ctx.plan.epsilons(), true));
    }
    if (probes.empty()) throw ConfigError("continuity-probe needs estimator.probes or at least one interface");
    r.predicted = 0.0;
    r.deviation = -1.0;
    for (const auto& pr : probes) {
        const double z = std::abs(pr.difference) / pr.std_error;
        if (!(z <= r.deviation)) {
            r.deviation = z;
            r.observed = pr.difference;
        }
    }
}

CheckResult run_one(const Context& ctx, const CheckSpec& c) {
    CheckResult r;
    r.name = c.name;
    r.kind = c.kind;
    r.tolerance = c.tolerance;
    const std::string prefix = "check '" + c.name + "': ";
    try {
        switch (c.kind) {
            case CheckKind::splitting_probability: splitting(ctx, c, r); break;
            case CheckKind::jump_ratio: jump_ratio(ctx, c, r, false); break;
            case CheckKind::occupation_ratio: jump_ratio(ctx, c, r, true); break;
            case CheckKind::duality: duality(ctx, r); break;
            case CheckKind::conservation: conservation(ctx, r); break;
            case CheckKind::continuity_probe: continuity(ctx, r); break;
        }
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.what());
    } catch (const DomainError& e) {
        throw DomainError(prefix + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(prefix + e.what());
    } catch (const UsageError& e) {
        throw UsageError(prefix + e.what());
    }
    r.passed = std::isfinite(r.deviation) && r.deviation < r.tolerance;
    return r;
}

void write_localtime(const std::string& path, const Context& ctx) {
    auto out = open_output(path);
    CsvWriter csv(out);
    csv.header({"x", "side", "epsilon", "notion", "value", "stderr"});
    if (!ctx.ensemble) return;
    std::vector<double> points = ctx.plan.estimator.probes;
    for (double x : ctx.medium.interface_positions()) points.push_back(x);
    std::sort(points.begin(), points.end());
    const auto eps = ctx.plan.epsilons();
    for (double x : points) {
        for (Side side : {Side::left, Side::right}) {
            const auto est = nlt_estimate(*ctx.ensemble, ctx.chain->grid, x, side, eps);
            for (std::size_t i = 0; i < eps.size(); ++i) {
                csv.row(x, to_string(side), eps[i], "nlt", est.values[i], est.std_errors[i]);
            }
            csv.row(x, to_string(side), 0.0, "nlt", est.value, est.std_error);
        }
    }
}

void write_ratio(const std::string& path, const Context& ctx) {
    auto out = open_output(path);
    CsvWriter csv(out);
    csv.header({"x_j", "predicted", "estimated", "half_width"});
    if (!ctx.ensemble) return;
    for (std::size_t j = 0; j < ctx.medium.interface_count(); ++j) {
        try {
            const auto rep = estimate_ratio(*ctx.ensemble, ctx.chain->grid, ctx.medium, j, ctx.plan.epsilons());
            csv.row(rep.interface_x, rep.predicted, rep.estimated, rep.half_width);
        } catch (const NumericalError&) {
            csv.row(ctx.medium.interface_position(j), predicted_ratio(ctx.medium, j), kNaN, kNaN);
        }
    }
}

void write_pde(const std::string& path, const Context& ctx) {
    auto out = open_output(path);
    CsvWriter csv(out);
    csv.header({"cell_center", "u", "p", "eta"});
    if (!ctx.pde) return;
    const auto p = p_from_q(*ctx.pde);
    const auto& s = ctx.pde->system;
    for (std::size_t i = 0; i < s.size(); ++i) csv.row(s.centers[i], ctx.pde->field.u[i], p[i], s.eta[i]);
}

}  // namespace

bool CheckReport::all_passed() const noexcept {
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

double duality_test_function(double y) noexcept { return std::exp(-y * y); }

CheckReport run_checks(const MediumSpec& spec, const ExperimentPlan& plan, const std::string& out_root) {
    const Medium medium(spec);
    const ScaleSpeed scale(medium);
    Context ctx{medium, scale, plan, std::nullopt, std::nullopt, std::nullopt};
    const auto& e = plan.engine;

    const bool need_paths = std::any_of(plan.checks.begin(), plan.checks.end(),
                                        [](const CheckSpec& c) { return uses_paths(c.kind); });
    const bool need_pde = std::any_of(plan.checks.begin(), plan.checks.end(),
                                      [](const CheckSpec& c) { return c.kind == CheckKind::duality; });
    if (need_paths) {
        ctx.chain = chain_parameters(scale, build_grid(medium, e.h));
        SimulationOptions opts;
        opts.mode = e.mode;
        opts.threads = e.threads;
        ctx.ensemble = simulate_paths(*ctx.chain, e.start, e.t, e.paths, e.seed, opts);
    }
    if (need_pde) {
        ctx.pde = solve_forward(medium, DeltaInitial{e.start}, e.t, plan.solver.cells, plan.solver.dt,
                                plan.solver.scheme);
    }

    CheckReport report;
    report.plan_name = plan.name;
    report.output_dir = (std::filesystem::path(out_root) / plan.name).string();
    report.results.resize(plan.checks.size());
    detail::parallel_blocks(plan.checks.size(), std::max(1u, e.threads),
                            [&](std::size_t i) { report.results[i] = run_one(ctx, plan.checks[i]); });
    std::sort(report.results.begin(), report.results.end(),
              [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });

    const auto dir = std::filesystem::path(report.output_dir);
    {
        auto out = open_output((dir / "ensemble.csv").string());
        if (ctx.ensemble) {
            write_node_summary(out, *ctx.ensemble, ctx.chain->grid.nodes);
        } else {
            CsvWriter(out).header({"node_x", "total_occupation_time", "visit_count"});
        }
    }
    write_localtime((dir / "localtime.csv").string(), ctx);
    write_ratio((dir / "ratio.csv").string(), ctx);
    write_pde((dir / "pde.csv").string(), ctx);
    {
        auto out = open_output((dir / "report.csv").string());
        CsvWriter csv(out);
        csv.header({"name", "kind", "predicted", "observed", "deviation", "tolerance", "pass"});
        for (const auto& r : report.results) {
            csv.row(r.name, to_string(r.kind), r.predicted, r.observed, r.deviation, r.tolerance,
                    r.passed ? "PASS" : "FAIL");
        }
    }
    return report;
}

}  // namespace skewlab
