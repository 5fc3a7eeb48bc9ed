#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "memkernel/memkernel.hpp"

// Strict JSON configuration for the memkernel CLI: every object lists the keys it
// accepts and anything else is a configuration error.

namespace memkernel::cli {

using nlohmann::json;

inline void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + " must be an object");
}

inline void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    expect_object(j, path);
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw ConfigError("unknown key '" + path + "." + it.key() + "'");
}

inline double number(const json& j, const std::string& path, const char* key, std::optional<double> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError("missing key '" + path + "." + key + "'");
    }
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError("'" + path + "." + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("'" + path + "." + key + "' must be finite");
    return d;
}

inline int integer(const json& j, const std::string& path, const char* key, std::optional<int> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError("missing key '" + path + "." + key + "'");
    }
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError("'" + path + "." + key + "' must be an integer");
    return v.get<int>();
}

inline std::vector<double> numbers(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw ConfigError("missing key '" + path + "." + key + "'");
    const json& v = j.at(key);
    if (!v.is_array() || v.empty()) throw ConfigError("'" + path + "." + key + "' must be a non-empty array");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number() || !std::isfinite(e.get<double>()))
            throw ConfigError("'" + path + "." + key + "' must hold finite numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

// Library validation failures surface as configuration errors.
template <class F>
void checked(const std::string& path, F&& validate) {
    try {
        validate();
    } catch (const Error& e) {
        if (e.code() == 2) throw ConfigError(path + ": " + e.what());
        throw;
    }
}

inline OperatorParams operator_params(const json& j, const std::string& path = "params") {
    allow_keys(j, path, {"eps", "a", "b", "beta"});
    OperatorParams p;
    p.eps = number(j, path, "eps", p.eps);
    p.a = number(j, path, "a", p.a);
    p.b = number(j, path, "b", p.b);
    p.beta = number(j, path, "beta", p.beta);
    checked(path, [&] { p.validate(); });
    return p;
}

inline EsjjParams esjj_params(const json& j, const std::string& path = "esjj") {
    allow_keys(j, path, {"eps", "alpha", "lam", "gamma", "length"});
    EsjjParams e;
    e.eps = number(j, path, "eps", e.eps);
    e.alpha = number(j, path, "alpha", e.alpha);
    e.lam = number(j, path, "lam", e.lam);
    e.gamma = number(j, path, "gamma", e.gamma);
    e.length = number(j, path, "length", e.length);
    checked(path, [&] { map_params(e); });
    return e;
}

inline SeriesControl series_control(const json& j, const std::string& path = "control") {
    allow_keys(j, path, {"quad_tol", "n_images", "t_floor"});
    SeriesControl c;
    c.quad_tol = number(j, path, "quad_tol", c.quad_tol);
    c.n_images = integer(j, path, "n_images", c.n_images);
    c.t_floor = number(j, path, "t_floor", c.t_floor);
    checked(path, [&] { c.validate(); });
    return c;
}

inline StripDomain strip(const json& j, const std::string& path = "domain") {
    allow_keys(j, path, {"length"});
    StripDomain d;
    d.length = number(j, path, "length", d.length);
    checked(path, [&] { d.validate(); });
    return d;
}

inline GridSpec grid_spec(const json& j, const std::string& path = "grid") {
    allow_keys(j, path, {"nx_cells", "nt_steps"});
    GridSpec g;
    g.nx_cells = integer(j, path, "nx_cells", g.nx_cells);
    g.nt_steps = integer(j, path, "nt_steps", g.nt_steps);
    checked(path, [&] { g.validate(); });
    return g;
}

/// Space presets: zero, constant, linear (left/right values), sine (amplitude, mode),
/// table (piecewise-linear through [x, value] points).
inline SpaceFn space_preset(const json& j, const std::string& path, double length) {
    expect_object(j, path);
    if (!j.contains("type") || !j.at("type").is_string()) throw ConfigError("'" + path + ".type' must be a string");
    const std::string type = j.at("type").get<std::string>();
    if (type == "zero") {
        allow_keys(j, path, {"type"});
        return {};
    }
    if (type == "constant") {
        allow_keys(j, path, {"type", "value"});
        const double v = number(j, path, "value");
        return [v](double) { return v; };
    }
    if (type == "linear") {
        allow_keys(j, path, {"type", "left", "right"});
        const double a = number(j, path, "left"), b = number(j, path, "right");
        return [a, b, length](double x) { return a + (b - a) * x / length; };
    }
    if (type == "sine") {
        allow_keys(j, path, {"type", "amplitude", "mode"});
        const double A = number(j, path, "amplitude", 1.0);
        const int m = integer(j, path, "mode", 1);
        if (m < 1) throw ConfigError("'" + path + ".mode' must be >= 1");
        return [A, m, length](double x) { return A * std::sin(m * std::numbers::pi * x / length); };
    }
    if (type == "table") {
        allow_keys(j, path, {"type", "points"});
        if (!j.contains("points") || !j.at("points").is_array() || j.at("points").size() < 2)
            throw ConfigError("'" + path + ".points' needs at least two [x, value] pairs");
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : j.at("points")) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw ConfigError("'" + path + ".points' entries must be [x, value]");
            pts.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
        for (std::size_t k = 1; k < pts.size(); ++k)
            if (!(pts[k].first > pts[k - 1].first)) throw ConfigError("'" + path + ".points' x must increase");
        if (pts.front().first > 0.0 || pts.back().first < length)
            throw ConfigError("'" + path + ".points' must cover [0, L]");
        return [pts](double x) {
            auto it = std::upper_bound(pts.begin(), pts.end(), x, [](double v, const auto& p) { return v < p.first; });
            if (it == pts.begin()) return pts.front().second;
            if (it == pts.end()) return pts.back().second;
            const auto& [x1, y1] = *it;
            const auto& [x0, y0] = *(it - 1);
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        };
    }
    throw ConfigError("'" + path + ".type' = '" + type + "' is not a space preset");
}

/// Time presets: zero, constant, step (limit (1 - e^{-rate t}) + offset), sine (amplitude, frequency).
inline TimeFn time_preset(const json& j, const std::string& path) {
    expect_object(j, path);
    if (!j.contains("type") || !j.at("type").is_string()) throw ConfigError("'" + path + ".type' must be a string");
    const std::string type = j.at("type").get<std::string>();
    if (type == "zero") {
        allow_keys(j, path, {"type"});
        return {};
    }
    if (type == "constant") {
        allow_keys(j, path, {"type", "value"});
        const double v = number(j, path, "value");
        return [v](double) { return v; };
    }
    if (type == "step") {
        allow_keys(j, path, {"type", "limit", "rate", "offset"});
        const double g = number(j, path, "limit"), k = number(j, path, "rate", 1.0), o = number(j, path, "offset", 0.0);
        if (!(k > 0)) throw ConfigError("'" + path + ".rate' must be positive");
        return [g, k, o](double t) { return o - g * std::expm1(-k * t); };
    }
    if (type == "sine") {
        allow_keys(j, path, {"type", "amplitude", "frequency"});
        const double A = number(j, path, "amplitude", 1.0), w = number(j, path, "frequency", 1.0);
        return [A, w](double t) { return A * std::sin(w * t); };
    }
    throw ConfigError("'" + path + ".type' = '" + type + "' is not a time preset");
}

inline std::optional<double> time_limit(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "zero") return 0.0;
    if (type == "constant") return j.at("value").get<double>();
    if (type == "step") return j.value("offset", 0.0) + j.at("limit").get<double>();
    return std::nullopt;
}

inline json read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    try {
        json j = json::parse(in);
        expect_object(j, "config");
        return j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace memkernel::cli
