#ifndef KACLAB_CONFIG_HPP
#define KACLAB_CONFIG_HPP

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kaclab {

/// Bad or unknown configuration; key() names the offending key when known.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& key, const std::string& what)
        : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Flat "key = value" text. Keys are dotted (params.M, thm1.t_grid); '#'
/// starts a comment. Every key must be read by the experiment, otherwise
/// reject_unused() fails naming it.
class Config {
public:
    static Config parse(std::string_view text);
    static Config load(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double def) const;
    int get_int(const std::string& key, int def) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
    bool get_bool(const std::string& key, bool def) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& def) const;
    std::vector<int> get_ints(const std::string& key, const std::vector<int>& def) const;

    /// "geom(t0, t1, n)", "lin(t0, t1, n)" or a comma list. Empty grids and
    /// negative or unsorted times are errors naming the key.
    std::vector<double> get_time_grid(const std::string& key, const std::string& def) const;

    void reject_unused() const;

    /// Sorted "key = value" lines.
    std::string canonical() const;
    std::uint64_t hash() const;

private:
    const std::string* raw(const std::string& key) const;

    std::map<std::string, std::string> kv_;
    mutable std::set<std::string> used_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view s);

/// Parses a time grid specification (see Config::get_time_grid).
std::vector<double> parse_time_grid(const std::string& spec);

} // namespace kaclab

#endif
