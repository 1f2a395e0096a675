#pragma once

#include "skewlab/path_engine.hpp"

#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace skewlab {

/// Shortest text that round-trips at 17 significant digits.
[[nodiscard]] std::string format_double(double v);

/// Comma-separated rows; doubles always printed with 17 significant digits.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(&out) {}

    void header(const std::vector<std::string>& columns);

    template <class... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((write_cell(cells, first)), ...);
        *out_ << '\n';
    }

private:
    void put(std::string_view text, bool& first);

    template <class T>
    void write_cell(const T& v, bool& first) {
        if constexpr (std::is_same_v<T, bool>) {
            put(v ? "1" : "0", first);
        } else if constexpr (std::is_floating_point_v<T>) {
            put(format_double(static_cast<double>(v)), first);
        } else if constexpr (std::is_integral_v<T>) {
            put(std::to_string(v), first);
        } else {
            put(std::string_view(v), first);
        }
    }

    std::ostream* out_;
};

/// Opens `path` for writing (parent directories created); throws ConfigError on failure.
[[nodiscard]] std::ofstream open_output(const std::string& path);

/// Ensemble file: "# skewlab-ensemble v1", one metadata comment line, then
/// rows path,node,occupation,is_final for every occupied node. Visit counts and
/// traces are not stored.
void write_ensemble(std::ostream& out, const PathEnsemble& ensemble);
[[nodiscard]] PathEnsemble read_ensemble(std::istream& in, const std::string& source = "<ensemble>");

/// node_x, total_occupation_time, visit_count
void write_node_summary(std::ostream& out, const PathEnsemble& ensemble, const std::vector<double>& node_x);

}  // namespace skewlab
