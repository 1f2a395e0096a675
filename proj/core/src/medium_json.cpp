#include "skewlab/medium_json.hpp"

#include "skewlab/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace skewlab {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         std::initializer_list<std::string_view> extra, const std::string& where) {
    for (const auto& item : obj.items()) {
        const auto& key = item.key();
        const bool known = std::find(allowed.begin(), allowed.end(), key) != allowed.end() ||
                           std::find(extra.begin(), extra.end(), key) != extra.end();
        if (!known) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(where + ": missing required key '" + key + "'");
    return *it;
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    return v.get<double>();
}

std::pair<double, double> as_pair(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2) throw ConfigError(where + ": expected an array of two numbers");
    return {as_number(v[0], where + "[0]"), as_number(v[1], where + "[1]")};
}

Cubic as_cubic(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty() || v.size() > 4) {
        throw ConfigError(where + ": expected an array of 1 to 4 polynomial coefficients");
    }
    Cubic c;
    for (std::size_t i = 0; i < v.size(); ++i) c.c[i] = as_number(v[i], where + "[" + std::to_string(i) + "]");
    return c;
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    return as_number(*it, where + "." + key);
}

}  // namespace

json parse_json_text(std::string_view text, std::string_view source) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // e.byte is 1-based and points one past the offending character.
        const std::size_t pos = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i < pos; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream os;
        os << source << ": parse error at line " << line << ", column " << col << ": " << e.what();
        throw ConfigError(os.str());
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_json_text(buf.str(), path);
}

MediumSpec medium_from_json(const json& doc, std::initializer_list<std::string_view> extra_top_level_keys) {
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    reject_unknown_keys(doc, {"window", "bounds", "interfaces", "pieces"}, extra_top_level_keys, "config");

    MediumSpec spec;
    const auto [lo, hi] = as_pair(require(doc, "window", "config"), "window");
    spec.window = {lo, hi};
    const auto [k, big_k] = as_pair(require(doc, "bounds", "config"), "bounds");
    spec.bounds = {k, big_k};

    const auto& ifs = require(doc, "interfaces", "config");
    if (!ifs.is_array()) throw ConfigError("interfaces: expected an array");
    for (std::size_t i = 0; i < ifs.size(); ++i) {
        const std::string where = "interfaces[" + std::to_string(i) + "]";
        const auto& obj = ifs[i];
        if (!obj.is_object()) throw ConfigError(where + ": expected an object");
        reject_unknown_keys(obj, {"x", "lambda", "beta_plus", "beta_minus"}, {}, where);
        Interface itf;
        itf.x = as_number(require(obj, "x", where), where + ".x");
        itf.lambda = optional_number(obj, "lambda", where);
        itf.beta_plus = optional_number(obj, "beta_plus", where);
        itf.beta_minus = optional_number(obj, "beta_minus", where);
        spec.interfaces.push_back(itf);
    }

    const auto& pcs = require(doc, "pieces", "config");
    if (!pcs.is_array()) throw ConfigError("pieces: expected an array");
    for (std::size_t i = 0; i < pcs.size(); ++i) {
        const std::string where = "pieces[" + std::to_string(i) + "]";
        const auto& obj = pcs[i];
        if (!obj.is_object()) throw ConfigError(where + ": expected an object");
        reject_unknown_keys(obj, {"left", "right", "D", "eta"}, {}, where);
        Piece p;
        p.left = as_number(require(obj, "left", where), where + ".left");
        p.right = as_number(require(obj, "right", where), where + ".right");
        p.diffusion = as_cubic(require(obj, "D", where), where + ".D");
        p.capacity = as_cubic(require(obj, "eta", where), where + ".eta");
        spec.pieces.push_back(p);
    }
    return spec;
}

json medium_to_json(const MediumSpec& spec) {
    json doc;
    doc["window"] = {spec.window.lo, spec.window.hi};
    doc["bounds"] = {spec.bounds.lower, spec.bounds.upper};
    doc["interfaces"] = json::array();
    for (const auto& itf : spec.interfaces) {
        json o{{"x", itf.x}};
        if (itf.lambda) o["lambda"] = *itf.lambda;
        if (itf.beta_plus) o["beta_plus"] = *itf.beta_plus;
        if (itf.beta_minus) o["beta_minus"] = *itf.beta_minus;
        doc["interfaces"].push_back(o);
    }
    doc["pieces"] = json::array();
    for (const auto& p : spec.pieces) {
        doc["pieces"].push_back({{"left", p.left},
                                 {"right", p.right},
                                 {"D", p.diffusion.c},
                                 {"eta", p.capacity.c}});
    }
    return doc;
}

}  // namespace skewlab
