#include "skewlab/csv.hpp"

#include "skewlab/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <istream>
#include <optional>
#include <sstream>

namespace skewlab {

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void CsvWriter::header(const std::vector<std::string>& columns) {
    bool first = true;
    for (const auto& c : columns) put(c, first);
    *out_ << '\n';
}

void CsvWriter::put(std::string_view text, bool& first) {
    if (!first) *out_ << ',';
    first = false;
    if (text.find_first_of(",\"\n") == std::string_view::npos) {
        *out_ << text;
        return;
    }
    *out_ << '"';
    for (char c : text) {
        if (c == '"') *out_ << '"';
        *out_ << c;
    }
    *out_ << '"';
}

std::ofstream open_output(const std::string& path) {
    const std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    return out;
}

void write_ensemble(std::ostream& out, const PathEnsemble& ensemble) {
    out << "# skewlab-ensemble v1\n";
    out << "# paths=" << ensemble.path_count() << " nodes=" << ensemble.node_count()
        << " horizon=" << format_double(ensemble.horizon()) << " start_node=" << ensemble.start_node()
        << " seed=" << ensemble.seed() << " mode=" << to_string(ensemble.mode())
        << " grid_spacing=" << format_double(ensemble.grid_spacing()) << '\n';
    CsvWriter csv(out);
    csv.header({"path", "node", "occupation", "is_final"});
    for (std::size_t p = 0; p < ensemble.path_count(); ++p) {
        const auto [first, occ] = ensemble.path_occupation(p);
        const std::size_t fin = ensemble.final_node(p);
        for (std::size_t i = 0; i < occ.size(); ++i) {
            const std::size_t node = first + i;
            if (occ[i] != 0.0 || node == fin) csv.row(p, node, occ[i], node == fin);
        }
    }
}

namespace {

std::string meta_value(const std::string& line, const std::string& key, const std::string& source) {
    std::istringstream is(line.substr(1));
    std::string tok;
    while (is >> tok) {
        if (tok.rfind(key + "=", 0) == 0) return tok.substr(key.size() + 1);
    }
    throw ConfigError(source + ": ensemble metadata lacks '" + key + "'");
}

}  // namespace

PathEnsemble read_ensemble(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line) || line != "# skewlab-ensemble v1") {
        throw ConfigError(source + ": not a skewlab ensemble file");
    }
    std::string meta;
    if (!std::getline(in, meta) || meta.empty() || meta[0] != '#') {
        throw ConfigError(source + ": missing ensemble metadata line");
    }
    std::size_t paths = 0;
    std::size_t nodes = 0;
    PathEnsemble ensemble;
    try {
        paths = std::stoull(meta_value(meta, "paths", source));
        nodes = std::stoull(meta_value(meta, "nodes", source));
        ensemble = PathEnsemble(nodes, std::stod(meta_value(meta, "horizon", source)),
                                std::stoull(meta_value(meta, "start_node", source)),
                                std::stoull(meta_value(meta, "seed", source)),
                                parse_holding_mode(meta_value(meta, "mode", source)),
                                std::stod(meta_value(meta, "grid_spacing", source)));
    } catch (const std::logic_error&) {
        throw ConfigError(source + ": malformed ensemble metadata");
    }
    if (!std::getline(in, line) || line != "path,node,occupation,is_final") {
        throw ConfigError(source + ": missing ensemble header row");
    }

    std::size_t line_no = 3;
    std::size_t current = 0;
    std::vector<std::pair<std::size_t, double>> cells;
    std::optional<std::size_t> final_node;
    auto flush = [&]() {
        if (!final_node) throw ConfigError(source + ": path " + std::to_string(current) + " has no final node");
        PathRecord rec;
        std::size_t lo = cells.front().first;
        std::size_t hi = cells.front().first;
        for (const auto& c : cells) {
            lo = std::min(lo, c.first);
            hi = std::max(hi, c.first);
        }
        rec.first_node = lo;
        rec.occupation.assign(hi - lo + 1, 0.0);
        for (const auto& [node, v] : cells) rec.occupation[node - lo] += v;
        rec.final_node = *final_node;
        rec.touched_boundary = lo == 0 || hi + 1 == nodes;
        ensemble.append(rec);
        cells.clear();
        final_node.reset();
        ++current;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t path = 0;
        std::size_t node = 0;
        double occ = 0.0;
        int is_final = 0;
        char c1 = 0;
        char c2 = 0;
        char c3 = 0;
        std::istringstream is(line);
        if (!(is >> path >> c1 >> node >> c2 >> occ >> c3 >> is_final) || c1 != ',' || c2 != ',' || c3 != ',' ||
            node >= nodes) {
            throw ConfigError(source + ": malformed row at line " + std::to_string(line_no));
        }
        if (path != current) {
            if (path != current + 1 || cells.empty()) {
                throw ConfigError(source + ": rows out of path order at line " + std::to_string(line_no));
            }
            flush();
        }
        cells.emplace_back(node, occ);
        if (is_final) final_node = node;
    }
    if (!cells.empty()) flush();
    if (ensemble.path_count() != paths) {
        throw ConfigError(source + ": expected " + std::to_string(paths) + " paths, found " +
                          std::to_string(ensemble.path_count()));
    }
    return ensemble;
}

void write_node_summary(std::ostream& out, const PathEnsemble& ensemble, const std::vector<double>& node_x) {
    if (node_x.size() != ensemble.node_count()) throw UsageError("write_node_summary: node count mismatch");
    CsvWriter csv(out);
    csv.header({"node_x", "total_occupation_time", "visit_count"});
    for (std::size_t k = 0; k < node_x.size(); ++k) {
        csv.row(node_x[k], ensemble.total_occupation()[k], ensemble.visit_count()[k]);
    }
}

}  // namespace skewlab
