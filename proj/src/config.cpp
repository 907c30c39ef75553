#include "lemkit/config.hpp"

#include <algorithm>

#include "lemkit/common.hpp"

namespace lemkit {

KeyValueConfig::KeyValueConfig(std::vector<std::string> allowed)
    : allowed_(std::move(allowed)) {}

void KeyValueConfig::check_key(const std::string& key) const {
    if (allowed_.empty()) return;
    if (std::find(allowed_.begin(), allowed_.end(), key) == allowed_.end())
        fail(ErrorCode::invalid_argument, "unknown config key '" + key + "'");
}

void KeyValueConfig::load_file(const std::string& path) {
    const std::string bytes = read_file(path);
    std::size_t line_no = 0;
    for (const std::string& raw : split(bytes, '\n')) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::parse, path + " line " + std::to_string(line_no) +
                                       ": expected key=value");
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    if (key.empty()) fail(ErrorCode::invalid_argument, "empty config key");
    check_key(key);
    values_[key] = value;
}

bool KeyValueConfig::has(const std::string& key) const {
    return values_.count(key) > 0;
}

std::string KeyValueConfig::get(const std::string& key) const {
    check_key(key);
    const auto it = values_.find(key);
    if (it == values_.end())
        fail(ErrorCode::invalid_argument, "missing config key '" + key + "'");
    return it->second;
}

std::string KeyValueConfig::get_or(const std::string& key,
                                   const std::string& dflt) const {
    check_key(key);
    const auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
    const std::string v = get(key);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        fail(ErrorCode::invalid_argument,
             "config key '" + key + "': '" + v + "' is not a number");
    }
}

std::int64_t KeyValueConfig::get_int(const std::string& key) const {
    const std::string v = get(key);
    try {
        std::size_t used = 0;
        const long long i = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        fail(ErrorCode::invalid_argument,
             "config key '" + key + "': '" + v + "' is not an integer");
    }
}

std::uint64_t KeyValueConfig::get_uint(const std::string& key) const {
    const std::string v = get(key);
    try {
        std::size_t used = 0;
        const unsigned long long u = std::stoull(v, &used);
        if (used != v.size() || v[0] == '-') throw std::invalid_argument(v);
        return u;
    } catch (const std::exception&) {
        fail(ErrorCode::invalid_argument,
             "config key '" + key + "': '" + v +
                 "' is not a non-negative integer");
    }
}

bool KeyValueConfig::get_bool(const std::string& key) const {
    const std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(ErrorCode::invalid_argument,
         "config key '" + key + "': '" + v + "' is not a boolean");
}

std::string KeyValueConfig::canonical() const {
    std::string out;
    for (const auto& [key, value] : values_) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    }
    return out;
}

}  // namespace lemkit
