#pragma once

#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bbm/estimates.hpp"

namespace bbm {

using json = nlohmann::json;

// Config rejected by the schema (unknown key, wrong type, bad shape). Carries
// the field path so the caller can say exactly where.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace cfg {

inline void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

// Fail-closed: any key outside the published set is an error.
inline void reject_unknown(const json& j, const std::string& path,
                           std::initializer_list<const char*> keys) {
    require_object(j, path);
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : keys)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known) throw ConfigError(path + "." + item.key() + ": unknown key");
    }
}

inline double get_number(const json& j, const std::string& path, const char* key, double def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(path + "." + key + ": expected a number");
    return v.get<double>();
}

inline int get_integer(const json& j, const std::string& path, const char* key, int def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(path + "." + key + ": expected an integer");
    return v.get<int>();
}

inline bool get_boolean(const json& j, const std::string& path, const char* key, bool def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_boolean()) throw ConfigError(path + "." + key + ": expected a boolean");
    return v.get<bool>();
}

inline std::string get_string(const json& j, const std::string& path, const char* key,
                              const std::string& def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_string()) throw ConfigError(path + "." + key + ": expected a string");
    return v.get<std::string>();
}

// Lebesgue indices admit infinity; configs spell it as the string "inf".
inline double get_lebesgue(const json& j, const std::string& path, const char* key, double def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (v.is_string()) {
        if (v.get<std::string>() == "inf") return inf;
        throw ConfigError(path + "." + key + ": expected a number or \"inf\"");
    }
    if (!v.is_number()) throw ConfigError(path + "." + key + ": expected a number or \"inf\"");
    return v.get<double>();
}

inline json lebesgue_json(double p) {
    if (p == inf) return json("inf");
    return json(p);
}

inline const json& get_section(const json& j, const std::string& path, const char* key) {
    static const json empty = json::object();
    if (!j.contains(key)) return empty;
    const json& v = j.at(key);
    if (!v.is_object()) throw ConfigError(path + "." + key + ": expected an object");
    return v;
}

// --- shared sections, resolved with every default echoed -------------------

inline json resolve_grid(const json& sec, const std::string& path, double L_def = 8.0 * pi,
                         int N_def = 256) {
    reject_unknown(sec, path, {"L", "N"});
    const double L = get_number(sec, path, "L", L_def);
    const int N = get_integer(sec, path, "N", N_def);
    if (!(L > 0.0)) throw ConfigError(path + ".L: must be positive");
    if (N < 4 || (N & (N - 1)) != 0)
        throw ConfigError(path + ".N: must be a power of two >= 4");
    return json{{"L", L}, {"N", N}};
}

inline GridSpec grid_from(const json& resolved) {
    return GridSpec(resolved.at("L").get<double>(), resolved.at("N").get<int>());
}

inline json resolve_pack(const json& sec, const std::string& path) {
    reject_unknown(sec, path, {"lambda", "sigma", "theta"});
    return json{{"lambda", get_integer(sec, path, "lambda", 6)},
                {"sigma", get_number(sec, path, "sigma", -4.0)},
                {"theta", get_number(sec, path, "theta", 0.25)}};
}

inline ExponentPack pack_from(const json& resolved) {
    return exponent_pack(resolved.at("lambda").get<int>(), resolved.at("sigma").get<double>(),
                         resolved.at("theta").get<double>());
}

inline json resolve_family(const json& sec, const std::string& path) {
    reject_unknown(sec, path,
                   {"seed", "count", "kind", "width_min", "width_max", "center_max", "mod_max",
                    "band_limit", "bumps"});
    const FamilyParams dflt{};
    const std::string kind = get_string(sec, path, "kind", "gaussian-packets");
    family_kind_from_name(kind); // unknown kind is a schema error
    json out{{"seed", get_integer(sec, path, "seed", 1)},
             {"count", get_integer(sec, path, "count", 32)},
             {"kind", kind},
             {"width_min", get_number(sec, path, "width_min", dflt.width_min)},
             {"width_max", get_number(sec, path, "width_max", dflt.width_max)},
             {"center_max", get_number(sec, path, "center_max", dflt.center_max)},
             {"mod_max", get_number(sec, path, "mod_max", dflt.mod_max)},
             {"band_limit", get_number(sec, path, "band_limit", dflt.band_limit)},
             {"bumps", get_integer(sec, path, "bumps", dflt.bumps)}};
    if (out.at("count").get<int>() < 1) throw ConfigError(path + ".count: must be >= 1");
    return out;
}

inline TestFamily family_from(const json& resolved) {
    TestFamily fam;
    fam.seed = static_cast<std::uint64_t>(resolved.at("seed").get<int>());
    fam.count = resolved.at("count").get<int>();
    fam.kind = family_kind_from_name(resolved.at("kind").get<std::string>());
    fam.params.width_min = resolved.at("width_min").get<double>();
    fam.params.width_max = resolved.at("width_max").get<double>();
    fam.params.center_max = resolved.at("center_max").get<double>();
    fam.params.mod_max = resolved.at("mod_max").get<double>();
    fam.params.band_limit = resolved.at("band_limit").get<double>();
    fam.params.bumps = resolved.at("bumps").get<int>();
    return fam;
}

inline json resolve_window(const json& sec, const std::string& path) {
    reject_unknown(sec, path, {"t_min", "t_max", "t_count", "T", "time_samples"});
    const EstimateWindow dflt{};
    json out{{"t_min", get_number(sec, path, "t_min", dflt.t_min)},
             {"t_max", get_number(sec, path, "t_max", dflt.t_max)},
             {"t_count", get_integer(sec, path, "t_count", dflt.t_count)},
             {"T", get_number(sec, path, "T", dflt.T)},
             {"time_samples", get_integer(sec, path, "time_samples", dflt.time_samples)}};
    if (!(out.at("t_min").get<double>() > 0.0))
        throw ConfigError(path + ".t_min: must be positive");
    if (!(out.at("t_max").get<double>() > out.at("t_min").get<double>()))
        throw ConfigError(path + ".t_max: must exceed t_min");
    if (out.at("t_count").get<int>() < 2) throw ConfigError(path + ".t_count: must be >= 2");
    if (!(out.at("T").get<double>() > 0.0)) throw ConfigError(path + ".T: must be positive");
    if (out.at("time_samples").get<int>() < 3)
        throw ConfigError(path + ".time_samples: must be >= 3");
    return out;
}

inline EstimateWindow window_from(const json& resolved) {
    EstimateWindow win;
    win.t_min = resolved.at("t_min").get<double>();
    win.t_max = resolved.at("t_max").get<double>();
    win.t_count = resolved.at("t_count").get<int>();
    win.T = resolved.at("T").get<double>();
    win.time_samples = resolved.at("time_samples").get<int>();
    return win;
}

inline json resolve_decomposition(const json& sec, const std::string& path) {
    reject_unknown(sec, path, {"k_max", "profile"});
    const std::string profile = get_string(sec, path, "profile", "smooth-bump");
    if (profile != "smooth-bump" && profile != "raised-cosine")
        throw ConfigError(path + ".profile: unknown profile '" + profile + "'");
    json out{{"k_max", get_integer(sec, path, "k_max", 12)}, {"profile", profile}};
    if (out.at("k_max").get<int>() < 1) throw ConfigError(path + ".k_max: must be >= 1");
    return out;
}

inline UniformDecomposition decomposition_from(const json& resolved, const GridSpec& grid) {
    return build_decomposition(grid, resolved.at("k_max").get<int>(),
                               detail::profile_by_name(resolved.at("profile").get<std::string>()));
}

inline QuadRule rule_from_string(const std::string& name, const std::string& path) {
    if (name == "trapezoid") return QuadRule::trapezoid;
    if (name == "simpson") return QuadRule::simpson;
    throw ConfigError(path + ": unknown quadrature rule '" + name + "'");
}

} // namespace cfg

} // namespace bbm
