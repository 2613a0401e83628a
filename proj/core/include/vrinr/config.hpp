#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vrinr/common.hpp"

namespace vrinr {

struct ConfigError : Error {
    using Error::Error;
};

// Flat key-value config with dotted keys, e.g. `model.levels=3`.
// Lines starting with '#' and blank lines are ignored.
class KvConfig {
public:
    static KvConfig parse_file(const std::string& path);
    static KvConfig parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void set_double(const std::string& key, double v);
    void set_int(const std::string& key, std::int64_t v);
    void set_bool(const std::string& key, bool v);

    std::string get_string(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key, double def) const;
    std::int64_t get_int(const std::string& key, std::int64_t def) const;
    bool get_bool(const std::string& key, bool def) const;
    std::vector<int> get_int_list(const std::string& key, const std::vector<int>& def) const;
    void set_int_list(const std::string& key, const std::vector<int>& v);

    // Later values win.
    void merge(const KvConfig& other);

    std::string serialize() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace vrinr
