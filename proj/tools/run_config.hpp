#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace polystyle::cli {

// Flat key = value configuration merged from a config file and flag
// overrides; '#' starts a comment. Fully resolved before any work starts and
// echoed into the run directory, so every run is reproducible from its echo.
class RunConfig {
public:
    static RunConfig train_defaults();

    void load_file(const std::string& path);
    void set(const std::string& key, const std::string& value);
    void apply_overrides(const std::vector<std::string>& key_equals_value);

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const;  // error when missing
    std::string get_or(const std::string& key, const std::string& def) const;
    int get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    uint64_t get_u64(const std::string& key) const;

    std::string canonical() const;  // sorted "key = value" lines
    uint64_t hash() const;
    std::string hash_hex() const;
    void save(const std::string& path) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace polystyle::cli
