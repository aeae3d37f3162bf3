#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hwy/common/error.hpp"

namespace hwy {

// Flat key/value configuration with dotted section names:
//
//   # comment
//   env.decision_interval = 1.0
//   experiment.arms = base, ttlc
//
// Later assignments override earlier ones. Lookups are typed; a present key
// whose value does not parse raises ConfigError naming the key.
class Config {
public:
    Config() = default;

    static Config parse(const std::string& text, const std::string& origin = "<string>");
    static Config load(const std::filesystem::path& path);

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma-separated list; empty items dropped.
    std::vector<std::string> get_list(const std::string& key) const;
    /// Integer list; also accepts inclusive ranges such as `0-14`.
    std::vector<int> get_int_list(const std::string& key) const;

    std::string require_string(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

    /// Canonical `key = value` lines, sorted by key.
    std::string dump(const std::string& line_prefix = "") const;

private:
    std::optional<std::string> lookup(const std::string& key) const;

    std::map<std::string, std::string> entries_;
};

}  // namespace hwy
