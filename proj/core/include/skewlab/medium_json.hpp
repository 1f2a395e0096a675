#pragma once

#include "skewlab/medium.hpp"

#include <nlohmann/json.hpp>

#include <initializer_list>
#include <string>
#include <string_view>

namespace skewlab {

/// Parse JSON text; syntax errors become ConfigError with "line L, column C".
[[nodiscard]] nlohmann::json parse_json_text(std::string_view text, std::string_view source = "<config>");

/// Read and parse a JSON file (ConfigError when unreadable or malformed).
[[nodiscard]] nlohmann::json load_json_file(const std::string& path);

/// Build a MediumSpec from a config document.
///
/// Schema: window:[y_min,y_max], bounds:[k,K],
/// interfaces:[{x, lambda?, beta_plus?, beta_minus?}...],
/// pieces:[{left, right, D:[c0..c3], eta:[c0..c3]}...].
/// Coefficient arrays may be shorter than four entries (missing high-order terms are 0).
/// Keys outside the schema are rejected unless listed in `extra_top_level_keys`.
[[nodiscard]] MediumSpec medium_from_json(const nlohmann::json& doc,
                                          std::initializer_list<std::string_view> extra_top_level_keys = {});

[[nodiscard]] nlohmann::json medium_to_json(const MediumSpec& spec);

}  // namespace skewlab
