#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#define TOML_EXCEPTIONS 1
#define TOML_HEADER_ONLY 1
#include <toml.hpp>

#include "diophantine.hpp"
#include "fourier.hpp"
#include "sums.hpp"

namespace latsum {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct TGridSpec {
    double start = 4.0, stop = 4096.0, ratio = 2.0;
    std::vector<double> values() const { return geometric_grid(start, stop, ratio); }
};

struct ExperimentConfig {
    std::string theta = "sqrt2";   // preset name, or comma separated decimals
    std::optional<int> d;          // checked against theta when given
    std::string cutoff = "gaussian:1";
    TGridSpec T_grid;
    double T = 8.0;
    std::vector<double> u;
    int u_resolution = 16;
    int L1_cap = 24;
    double eps_trunc = 1e-10;
    std::string precision = "double-double";
    int threads = 0;               // 0 keeps LATSUM_THREADS / default
    std::int64_t search_cap = 10000000;
    std::string method = "direct";
    std::string csv, svg, json;
};

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        auto a = cur.find_first_not_of(" \t");
        auto b = cur.find_last_not_of(" \t");
        out.push_back(a == std::string::npos ? "" : cur.substr(a, b - a + 1));
    }
    return out;
}

inline std::vector<double> parse_doubles(const std::string& s)
{
    std::vector<double> v;
    for (const auto& t : split(s, ',')) {
        try {
            std::size_t pos = 0;
            v.push_back(std::stod(t, &pos));
            if (pos != t.size())
                throw ConfigError("bad number: " + t);
        } catch (const std::logic_error&) {
            throw ConfigError("bad number: " + t);
        }
    }
    return v;
}

// "start:stop:ratio"
inline TGridSpec parse_T_grid(const std::string& s)
{
    auto p = split(s, ':');
    if (p.size() != 3)
        throw ConfigError("T grid must be start:stop:ratio");
    TGridSpec g;
    try {
        g.start = std::stod(p[0]);
        g.stop = std::stod(p[1]);
        g.ratio = std::stod(p[2]);
    } catch (const std::logic_error&) {
        throw ConfigError("bad T grid: " + s);
    }
    return g;
}

inline ThetaVector resolve_theta(const std::string& spec)
{
    if (spec.empty())
        throw ConfigError("no theta given");
    if (spec.find(',') == std::string::npos && (std::isalpha(static_cast<unsigned char>(spec[0])))) {
        try {
            return make_preset(spec);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    try {
        return theta_from_decimals(split(spec, ','), "custom");
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

// "gaussian:sigma" or "rational:a"
inline CutoffFunction resolve_cutoff(const std::string& spec, int d)
{
    auto p = split(spec, ':');
    double param = p.size() > 1 ? std::stod(p[1]) : 0.0;
    if (p[0] == "gaussian")
        return CutoffFunction::gaussian(d, p.size() > 1 ? param : 1.0);
    if (p[0] == "rational") {
        if (p.size() < 2)
            throw ConfigError("rational cutoff needs an exponent");
        return CutoffFunction::rational(d, param);
    }
    throw ConfigError("unknown cutoff: " + spec);
}

inline void validate(const ExperimentConfig& c)
{
    if (!(c.eps_trunc > 0.0 && c.eps_trunc <= 1e-3))
        throw ConfigError("eps_trunc must lie in (0, 1e-3]");
    if (c.L1_cap < 0)
        throw ConfigError("L1_cap must be non-negative");
    if (c.u_resolution < 1)
        throw ConfigError("u grid resolution must be positive");
    if (!(c.T > 0.0))
        throw ConfigError("T must be positive");
    if (c.precision != "double-double" && c.precision != "dd")
        throw ConfigError("unsupported precision mode: " + c.precision);
    if (c.method != "direct" && c.method != "dyadic")
        throw ConfigError("method must be direct or dyadic");
    if (c.search_cap < 1)
        throw ConfigError("search_cap must be >= 1");
    try {
        c.T_grid.values();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

inline ExperimentConfig load_config(const std::string& path)
{
    toml::table t;
    try {
        t = toml::parse_file(path);
    } catch (const toml::parse_error& e) {
        throw ConfigError(std::string("cannot parse ") + path + ": " + std::string(e.description()));
    }
    ExperimentConfig c;
    if (auto v = t["theta"].value<std::string>())
        c.theta = *v;
    else if (auto arr = t["theta"].as_array()) {
        std::string s;
        for (const auto& e : *arr) {
            auto str = e.value<std::string>();
            if (!str)
                throw ConfigError("theta components must be strings");
            s += (s.empty() ? "" : ",") + *str;
        }
        c.theta = s;
    }
    if (auto v = t["d"].value<int64_t>())
        c.d = int(*v);
    if (auto v = t["cutoff"].value<std::string>())
        c.cutoff = *v;
    if (auto v = t["T"].value<double>())
        c.T = *v;
    if (auto v = t["T_grid"].value<std::string>())
        c.T_grid = parse_T_grid(*v);
    else if (auto g = t["T_grid"].as_table()) {
        c.T_grid.start = (*g)["start"].value_or(c.T_grid.start);
        c.T_grid.stop = (*g)["stop"].value_or(c.T_grid.stop);
        c.T_grid.ratio = (*g)["ratio"].value_or(c.T_grid.ratio);
    }
    if (auto arr = t["u"].as_array())
        for (const auto& e : *arr)
            c.u.push_back(e.value_or(0.0));
    if (auto v = t["u_resolution"].value<int64_t>())
        c.u_resolution = int(*v);
    if (auto v = t["L1_cap"].value<int64_t>())
        c.L1_cap = int(*v);
    if (auto v = t["eps_trunc"].value<double>())
        c.eps_trunc = *v;
    if (auto v = t["precision"].value<std::string>())
        c.precision = *v;
    if (auto v = t["threads"].value<int64_t>())
        c.threads = int(*v);
    if (auto v = t["search_cap"].value<int64_t>())
        c.search_cap = *v;
    if (auto v = t["method"].value<std::string>())
        c.method = *v;
    if (auto o = t["output"].as_table()) {
        c.csv = (*o)["csv"].value_or(std::string());
        c.svg = (*o)["svg"].value_or(std::string());
        c.json = (*o)["json"].value_or(std::string());
    }
    return c;
}

} // namespace latsum
