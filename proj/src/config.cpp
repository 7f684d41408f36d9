#include "dsfpair/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "dsfpair/errors.hpp"

namespace dsfpair {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("config key '" + key + "': trailing characters in '" + v + "'");
    return x;
}

}  // namespace

Config Config::from_text(const std::string& text, const std::string& origin) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (kv.count(key)) throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv[key] = value;
    }
    return Config(std::move(kv));
}

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str(), path);
}

std::string Config::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing required config key '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const { return parse_double(key, get_string(key)); }

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key) const {
    const std::string v = get_string(key);
    const double x = parse_double(key, v);
    if (x < 0 || x != static_cast<double>(static_cast<std::uint64_t>(x)))
        throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
    return static_cast<std::uint64_t>(x);
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> Config::get_double_list(const std::string& key) const {
    const std::string v = get_string(key);
    std::vector<double> out;
    std::string cur;
    for (char c : v + ",") {
        if (c == ',') {
            const std::string item = trim(cur);
            if (!item.empty()) out.push_back(parse_double(key, item));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': expected a comma-separated number list");
    return out;
}

void validate_schema(const Config& cfg, const std::vector<KeySpec>& schema) {
    std::vector<std::string> problems;
    for (const auto& spec : schema) {
        if (!cfg.has(spec.key)) {
            if (spec.required) problems.push_back("missing required key '" + spec.key + "'");
            continue;
        }
        try {
            switch (spec.kind) {
                case KeySpec::Double: cfg.get_double(spec.key); break;
                case KeySpec::Integer: cfg.get_u64(spec.key); break;
                case KeySpec::Boolean: cfg.get_bool(spec.key, false); break;
                case KeySpec::String: break;
                case KeySpec::DoubleList: cfg.get_double_list(spec.key); break;
            }
        } catch (const ConfigError& e) {
            problems.emplace_back(e.what());
        }
    }
    for (const auto& [key, value] : cfg.entries()) {
        (void)value;
        bool known = false;
        for (const auto& spec : schema)
            if (spec.key == key) { known = true; break; }
        if (!known) problems.push_back("unknown key '" + key + "'");
    }
    if (!problems.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ConfigError(msg);
    }
}

}  // namespace dsfpair
