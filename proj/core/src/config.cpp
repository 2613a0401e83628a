#include "vrinr/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vrinr {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

KvConfig KvConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

KvConfig KvConfig::parse_string(const std::string& text, const std::string& origin) {
    KvConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        cfg.values_[key] = trim(t.substr(eq + 1));
    }
    return cfg;
}

void KvConfig::set_double(const std::string& key, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    values_[key] = buf;
}

void KvConfig::set_int(const std::string& key, std::int64_t v) { values_[key] = std::to_string(v); }

void KvConfig::set_bool(const std::string& key, bool v) { values_[key] = v ? "true" : "false"; }

std::string KvConfig::get_string(const std::string& key, const std::string& def) const {
    const auto it = values_.find(key);
    return it == values_.end() ? def : it->second;
}

double KvConfig::get_double(const std::string& key, double def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse '" + it->second + "' as number");
    }
}

std::int64_t KvConfig::get_int(const std::string& key, std::int64_t def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
    if (ec != std::errc() || p != it->second.data() + it->second.size())
        throw ConfigError("key '" + key + "': cannot parse '" + it->second + "' as integer");
    return v;
}

bool KvConfig::get_bool(const std::string& key, bool def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("key '" + key + "': cannot parse '" + it->second + "' as bool");
}

std::vector<int> KvConfig::get_int_list(const std::string& key, const std::vector<int>& def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    std::vector<int> out;
    std::istringstream in(it->second);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            out.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': cannot parse '" + tok + "' as integer");
        }
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

void KvConfig::set_int_list(const std::string& key, const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    values_[key] = s;
}

void KvConfig::merge(const KvConfig& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::string KvConfig::serialize() const {
    std::string out;
    for (const auto& [k, v] : values_) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

}  // namespace vrinr
