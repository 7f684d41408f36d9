#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dsfpair {

// Flat key-value run configuration. Keys are dotted paths grouped by
// section (pump., fiber., filter., detector., calibration., run., ...);
// physical quantities carry their unit in the key name (e.g. pump.fwhm_nm).
//
// File syntax: one `key = value` pair per line, '#' starts a comment.
class Config {
  public:
    Config() = default;
    explicit Config(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

    static Config from_file(const std::string& path);
    static Config from_text(const std::string& text, const std::string& origin = "<inline>");

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key) const;  // comma separated

    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

// Declarative schema used to produce itemized config diagnostics.
struct KeySpec {
    std::string key;
    enum Kind { Double, Integer, Boolean, String, DoubleList } kind = Double;
    bool required = false;
};

// Collects every violation (missing required key, unparseable value,
// unknown key) and throws ConfigError listing all of them at once.
void validate_schema(const Config& cfg, const std::vector<KeySpec>& schema);

}  // namespace dsfpair
