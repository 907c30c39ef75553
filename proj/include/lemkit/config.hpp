#pragma once

// Flat key=value configuration. Files hold one `key=value` per line with
// `#` comments; every key can be overridden afterwards (the CLI maps each
// flag onto the key of the same name). Unknown keys are errors.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lemkit {

class KeyValueConfig {
public:
    /// `allowed` fixes the key universe; pass an empty list to accept any.
    explicit KeyValueConfig(std::vector<std::string> allowed = {});

    void load_file(const std::string& path);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const;  // throws when missing
    std::string get_or(const std::string& key, const std::string& dflt) const;

    double get_double(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    /// Sorted `key=value` lines; the input to the config hash.
    std::string canonical() const;

    const std::map<std::string, std::string>& entries() const {
        return values_;
    }

private:
    void check_key(const std::string& key) const;
    std::vector<std::string> allowed_;
    std::map<std::string, std::string> values_;
};

}  // namespace lemkit
