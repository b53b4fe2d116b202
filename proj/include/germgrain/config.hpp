#pragma once

// Flat key-value configuration with [section] grouping. Keys are stored as
// "section.key", values as trimmed strings. Readers mark every key they
// consume; finish() rejects whatever is left, so unknown keys fail loudly
// with their full name. The canonical hash feeds reproducibility stamps in
// every CSV artifact.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"

namespace germgrain {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

}  // namespace detail

class Config {
public:
    Config() = default;

    static Config parse(std::istream& is) {
        Config cfg;
        std::string line, section;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::string t = detail::trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t.front() == '[') {
                if (t.back() != ']')
                    throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section header");
                section = detail::trim(t.substr(1, t.size() - 2));
                if (!detail::valid_name(section))
                    throw ConfigError("config line " + std::to_string(lineno) + ": bad section name '" + section + "'");
                continue;
            }
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
            std::string key = detail::trim(t.substr(0, eq));
            std::string value = detail::trim(t.substr(eq + 1));
            if (!detail::valid_name(key))
                throw ConfigError("config line " + std::to_string(lineno) + ": bad key name '" + key + "'");
            std::string full = section.empty() ? key : section + "." + key;
            if (cfg.kv_.count(full))
                throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + full + "'");
            cfg.kv_[full] = value;
        }
        return cfg;
    }

    static Config parse_text(const std::string& text) {
        std::istringstream ss(text);
        return parse(ss);
    }

    static Config load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw ConfigError("cannot open config file: " + path);
        return parse(f);
    }

    /// Set (or override) a key; the key counts as present but not consumed.
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    /// True when any key in the section exists, consumed or not.
    bool has_section(const std::string& section) const {
        auto it = kv_.lower_bound(section + ".");
        return it != kv_.end() && it->first.rfind(section + ".", 0) == 0;
    }

    std::string get_str(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw ConfigError("missing required config key '" + key + "'");
        touched_.insert(key);
        return it->second;
    }

    std::string get_str(const std::string& key, const std::string& def) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return def;
        touched_.insert(key);
        return it->second;
    }

    double get_num(const std::string& key) const { return to_num(key, get_str(key)); }
    double get_num(const std::string& key, double def) const {
        return has(key) ? to_num(key, get_str(key)) : def;
    }

    std::int64_t get_int(const std::string& key) const { return to_int(key, get_str(key)); }
    std::int64_t get_int(const std::string& key, std::int64_t def) const {
        return has(key) ? to_int(key, get_str(key)) : def;
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t def) const {
        if (!has(key)) return def;
        const std::string s = get_str(key);
        char* end = nullptr;
        errno = 0;
        std::uint64_t v = std::strtoull(s.c_str(), &end, 10);
        if (errno != 0 || end == s.c_str() || *end != '\0')
            throw ConfigError("config key '" + key + "': expected an unsigned integer, got '" + s + "'");
        return v;
    }

    /// Whitespace-separated list of numbers.
    std::vector<double> get_list(const std::string& key) const {
        std::istringstream ss(get_str(key));
        std::vector<double> out;
        std::string tok;
        while (ss >> tok) out.push_back(to_num(key, tok));
        if (out.empty()) throw ConfigError("config key '" + key + "': expected a list of numbers");
        return out;
    }

    /// Every stored key must have been consumed by now.
    void finish(const std::string& context) const {
        for (const auto& [k, v] : kv_)
            if (!touched_.count(k))
                throw ConfigError("unknown config key '" + k + "' for " + context);
    }

    /// FNV-1a over the subcommand plus the sorted key=value lines. Output
    /// plumbing (run.out, run.threads) never changes results, so it is
    /// excluded: artifacts keep the same stamp wherever they are written.
    std::uint64_t hash(const std::string& subcommand) const {
        std::string buf = subcommand;
        buf.push_back('\n');
        for (const auto& [k, v] : kv_) {
            if (k == "run.out" || k == "run.threads") continue;
            buf += k;
            buf.push_back('=');
            buf += v;
            buf.push_back('\n');
        }
        return fnv1a64(buf);
    }

private:
    static double to_num(const std::string& key, const std::string& s) {
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0')
            throw ConfigError("config key '" + key + "': expected a number, got '" + s + "'");
        return v;
    }

    static std::int64_t to_int(const std::string& key, const std::string& s) {
        char* end = nullptr;
        errno = 0;
        long long v = std::strtoll(s.c_str(), &end, 10);
        if (errno != 0 || end == s.c_str() || *end != '\0')
            throw ConfigError("config key '" + key + "': expected an integer, got '" + s + "'");
        return v;
    }

    std::map<std::string, std::string> kv_;
    mutable std::set<std::string> touched_;
};

inline std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace germgrain
