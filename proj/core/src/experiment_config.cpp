#include "skewlab/experiment_config.hpp"

#include "skewlab/error.hpp"
#include "skewlab/medium_json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace skewlab {
namespace {

using nlohmann::json;

struct KindName {
    CheckKind kind;
    const char* name;
};

constexpr KindName kKinds[] = {
    {CheckKind::splitting_probability, "splitting-probability"},
    {CheckKind::jump_ratio, "jump-ratio"},
    {CheckKind::occupation_ratio, "occupation-ratio"},
    {CheckKind::duality, "duality"},
    {CheckKind::conservation, "conservation"},
    {CheckKind::continuity_probe, "continuity-probe"},
};

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

double number(const json& obj, const char* key, const std::string& where, double fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number()) throw ConfigError(where + "." + key + ": expected a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw ConfigError(where + "." + key + ": must be finite");
    return v;
}

double positive(const json& obj, const char* key, const std::string& where, double fallback) {
    const double v = number(obj, key, where, fallback);
    if (!(v > 0.0)) throw ConfigError(where + "." + key + ": must be positive");
    return v;
}

std::uint64_t count(const json& obj, const char* key, const std::string& where, std::uint64_t fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number_unsigned()) throw ConfigError(where + "." + key + ": expected a non-negative integer");
    return it->get<std::uint64_t>();
}

std::string text(const json& obj, const char* key, const std::string& where, const std::string& fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_string()) throw ConfigError(where + "." + key + ": expected a string");
    return it->get<std::string>();
}

std::vector<double> numbers(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) return {};
    if (!it->is_array()) throw ConfigError(where + "." + key + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : *it) {
        if (!v.is_number()) throw ConfigError(where + "." + key + ": expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

ExperimentPlan parse_plan(const json& doc, const std::string& default_name) {
    const std::string where = "experiment";
    reject_unknown(doc, {"name", "engine", "estimator", "solver", "checks"}, where);
    ExperimentPlan plan;
    plan.name = text(doc, "name", where, default_name);
    if (plan.name.empty() || plan.name.find_first_of("/\\") != std::string::npos) {
        throw ConfigError("experiment.name: must be a non-empty plain name");
    }

    const json empty = json::object();
    const auto section = [&](const char* key) -> const json& {
        const auto it = doc.find(key);
        return it == doc.end() ? empty : *it;
    };

    const json& engine = section("engine");
    reject_unknown(engine, {"h", "t", "paths", "seed", "mode", "start", "threads"}, "experiment.engine");
    auto& e = plan.engine;
    e.h = positive(engine, "h", "experiment.engine", e.h);
    e.t = positive(engine, "t", "experiment.engine", e.t);
    e.paths = count(engine, "paths", "experiment.engine", e.paths);
    if (e.paths == 0) throw ConfigError("experiment.engine.paths: must be at least 1");
    e.seed = count(engine, "seed", "experiment.engine", e.seed);
    e.mode = parse_holding_mode(text(engine, "mode", "experiment.engine", to_string(e.mode)));
    e.start = number(engine, "start", "experiment.engine", e.start);
    e.threads = static_cast<unsigned>(count(engine, "threads", "experiment.engine", e.threads));

    const json& est = section("estimator");
    reject_unknown(est, {"epsilons", "probes"}, "experiment.estimator");
    plan.estimator.epsilons = numbers(est, "epsilons", "experiment.estimator");
    plan.estimator.probes = numbers(est, "probes", "experiment.estimator");
    for (std::size_t i = 0; i < plan.estimator.epsilons.size(); ++i) {
        const double v = plan.estimator.epsilons[i];
        if (!(v > 0.0) || (i > 0 && !(v < plan.estimator.epsilons[i - 1]))) {
            throw ConfigError("experiment.estimator.epsilons: must be positive and strictly decreasing");
        }
    }

    const json& solver = section("solver");
    reject_unknown(solver, {"cells", "dt", "scheme", "conservation_steps"}, "experiment.solver");
    auto& s = plan.solver;
    s.cells = count(solver, "cells", "experiment.solver", s.cells);
    s.dt = positive(solver, "dt", "experiment.solver", s.dt);
    s.scheme = parse_scheme(text(solver, "scheme", "experiment.solver", to_string(s.scheme)));
    s.conservation_steps = count(solver, "conservation_steps", "experiment.solver", s.conservation_steps);

    const json& checks = section("checks");
    if (!checks.is_array() && !checks.empty()) throw ConfigError("experiment.checks: expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const std::string cw = "experiment.checks[" + std::to_string(i) + "]";
        const json& c = checks[i];
        reject_unknown(c, {"kind", "name", "tolerance", "interface"}, cw);
        if (!c.contains("kind")) throw ConfigError(cw + ": missing required key 'kind'");
        CheckSpec spec;
        spec.kind = parse_check_kind(text(c, "kind", cw, ""));
        spec.name = text(c, "name", cw, to_string(spec.kind));
        spec.tolerance = number(c, "tolerance", cw, default_tolerance(spec.kind));
        if (spec.tolerance < 0.0) throw ConfigError(cw + ".tolerance: must not be negative");
        spec.interface_index = count(c, "interface", cw, 0);
        if (!names.insert(spec.name).second) throw ConfigError(cw + ": duplicate check name '" + spec.name + "'");
        plan.checks.push_back(std::move(spec));
    }
    return plan;
}

}  // namespace

const char* to_string(CheckKind kind) noexcept {
    for (const auto& k : kKinds) {
        if (k.kind == kind) return k.name;
    }
    return "?";
}

CheckKind parse_check_kind(const std::string& text) {
    std::string known;
    for (const auto& k : kKinds) {
        if (text == k.name) return k.kind;
        known += known.empty() ? "" : ", ";
        known += k.name;
    }
    throw ConfigError("unknown check kind '" + text + "' (registered: " + known + ")");
}

double default_tolerance(CheckKind kind) noexcept {
    switch (kind) {
        case CheckKind::splitting_probability: return 3.0;
        case CheckKind::jump_ratio: return 0.1;
        case CheckKind::occupation_ratio: return 0.1;
        case CheckKind::duality: return 3.0;
        case CheckKind::conservation: return 1e-10;
        case CheckKind::continuity_probe: return 3.0;
    }
    return 0.0;
}

std::vector<double> ExperimentPlan::epsilons() const {
    if (!estimator.epsilons.empty()) return estimator.epsilons;
    return {8.0 * engine.h, 4.0 * engine.h, 2.0 * engine.h};
}

ParsedConfig parse_config_text(const std::string& text, const std::string& default_name) {
    const json doc = parse_json_text(text, default_name);
    ParsedConfig out;
    out.medium = medium_from_json(doc, {"experiment"});
    const auto report = validate_model(out.medium);
    if (!report.ok()) throw ConfigError("config failed validation:\n" + report.summary());
    if (const auto it = doc.find("experiment"); it != doc.end()) out.plan = parse_plan(*it, default_name);
    return out;
}

ParsedConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), std::filesystem::path(path).stem().string());
}

}  // namespace skewlab
