#include "hwy/common/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hwy {
namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto body = trim(line);
        if (body.empty()) continue;
        auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        }
        auto key = trim(std::string_view(body).substr(0, eq));
        auto value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        }
        cfg.entries_[key] = value;
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

void Config::set(const std::string& key, const std::string& value) { entries_[key] = value; }

std::optional<std::string> Config::lookup(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return lookup(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
    auto v = lookup(key);
    if (!v) return fallback;
    double out = 0.0;
    if (!parse_number(*v, out) || !std::isfinite(out)) {
        throw ConfigError("config key " + key + ": expected a number, got '" + *v + "'");
    }
    return out;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
    auto v = lookup(key);
    if (!v) return fallback;
    std::int64_t out = 0;
    if (!parse_number(*v, out)) {
        throw ConfigError("config key " + key + ": expected an integer, got '" + *v + "'");
    }
    return out;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    auto v = lookup(key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    if (!parse_number(*v, out)) {
        throw ConfigError("config key " + key + ": expected an unsigned integer, got '" + *v + "'");
    }
    return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto v = lookup(key);
    if (!v) return fallback;
    std::string s = *v;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("config key " + key + ": expected a boolean, got '" + *v + "'");
}

std::vector<std::string> Config::get_list(const std::string& key) const {
    std::vector<std::string> out;
    auto v = lookup(key);
    if (!v) return out;
    std::istringstream in(*v);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

std::vector<int> Config::get_int_list(const std::string& key) const {
    std::vector<int> out;
    for (const auto& item : get_list(key)) {
        auto dash = item.find('-', 1);
        int lo = 0;
        int hi = 0;
        if (dash == std::string::npos) {
            if (!parse_number(item, lo)) {
                throw ConfigError("config key " + key + ": bad integer '" + item + "'");
            }
            out.push_back(lo);
            continue;
        }
        if (!parse_number(trim(item.substr(0, dash)), lo) ||
            !parse_number(trim(item.substr(dash + 1)), hi) || hi < lo) {
            throw ConfigError("config key " + key + ": bad range '" + item + "'");
        }
        for (int i = lo; i <= hi; ++i) out.push_back(i);
    }
    return out;
}

std::string Config::require_string(const std::string& key) const {
    auto v = lookup(key);
    if (!v) throw ConfigError("missing required config key " + key);
    return *v;
}

std::string Config::dump(const std::string& line_prefix) const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += line_prefix + k + " = " + v + "\n";
    }
    return out;
}

}  // namespace hwy
