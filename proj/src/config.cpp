#include "kaclab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace kaclab {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

double to_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a number, got '" + v + "'");
    }
}

} // namespace

std::uint64_t fnv1a64(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Config Config::parse(std::string_view text)
{
    Config c;
    std::istringstream is{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("", "line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
        for (char ch : key) {
            if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '_')) {
                throw ConfigError(key, "invalid character in key on line " + std::to_string(lineno));
            }
        }
        if (c.kv_.count(key)) throw ConfigError(key, "duplicate key on line " + std::to_string(lineno));
        c.kv_[key] = value;
    }
    return c;
}

Config Config::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void Config::set(const std::string& key, const std::string& value) { kv_[key] = value; }

const std::string* Config::raw(const std::string& key) const
{
    used_.insert(key);
    auto it = kv_.find(key);
    return it == kv_.end() ? nullptr : &it->second;
}

std::string Config::get_string(const std::string& key) const
{
    if (auto v = raw(key)) return *v;
    throw ConfigError(key, "required key is missing");
}

std::string Config::get_string(const std::string& key, const std::string& def) const
{
    auto v = raw(key);
    return v ? *v : def;
}

double Config::get_double(const std::string& key) const { return to_double(key, get_string(key)); }

double Config::get_double(const std::string& key, double def) const
{
    auto v = raw(key);
    return v ? to_double(key, *v) : def;
}

int Config::get_int(const std::string& key, int def) const
{
    auto v = raw(key);
    if (!v) return def;
    const double d = to_double(key, *v);
    if (d != std::floor(d) || std::abs(d) > 2e9) throw ConfigError(key, "expected an integer, got '" + *v + "'");
    return int(d);
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t def) const
{
    auto v = raw(key);
    if (!v) return def;
    try {
        std::size_t pos = 0;
        const auto x = std::stoull(*v, &pos);
        if (pos != v->size() || (*v)[0] == '-') throw std::invalid_argument("bad");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected an unsigned integer, got '" + *v + "'");
    }
}

bool Config::get_bool(const std::string& key, bool def) const
{
    auto v = raw(key);
    if (!v) return def;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError(key, "expected true or false, got '" + *v + "'");
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& def) const
{
    auto v = raw(key);
    if (!v) return def;
    std::vector<double> out;
    for (const auto& part : split(*v, ',')) {
        if (part.empty()) throw ConfigError(key, "empty list entry");
        out.push_back(to_double(key, part));
    }
    if (out.empty()) throw ConfigError(key, "empty list");
    return out;
}

std::vector<int> Config::get_ints(const std::string& key, const std::vector<int>& def) const
{
    std::vector<double> d(def.begin(), def.end());
    std::vector<int> out;
    for (double x : get_doubles(key, d)) {
        if (x != std::floor(x)) throw ConfigError(key, "expected integers");
        out.push_back(int(x));
    }
    return out;
}

std::vector<double> parse_time_grid(const std::string& spec)
{
    const std::string s = trim(spec);
    std::vector<double> out;
    auto ranged = [&](const std::string& name) -> bool {
        if (s.rfind(name + "(", 0) != 0 || s.back() != ')') return false;
        const auto args = split(s.substr(name.size() + 1, s.size() - name.size() - 2), ',');
        if (args.size() != 3) throw std::invalid_argument(name + "(t0, t1, n) needs three arguments");
        const double t0 = std::stod(args[0]), t1 = std::stod(args[1]);
        const int n = std::stoi(args[2]);
        if (n < 1) return true;
        if (n == 1) {
            out.push_back(t0);
            return true;
        }
        if (name == "geom" && !(t0 > 0 && t1 > 0)) throw std::invalid_argument("geom grid needs positive end points");
        for (int k = 0; k < n; ++k) {
            const double f = double(k) / (n - 1);
            out.push_back(name == "geom" ? t0 * std::pow(t1 / t0, f) : t0 + (t1 - t0) * f);
        }
        return true;
    };
    if (!ranged("geom") && !ranged("lin")) {
        for (const auto& part : split(s, ','))
            if (!part.empty()) out.push_back(std::stod(part));
    }
    return out;
}

std::vector<double> Config::get_time_grid(const std::string& key, const std::string& def) const
{
    auto v = raw(key);
    const std::string spec = v ? *v : def;
    std::vector<double> g;
    try {
        g = parse_time_grid(spec);
    } catch (const std::exception& e) {
        throw ConfigError(key, std::string("bad time grid: ") + e.what());
    }
    if (g.empty()) throw ConfigError(key, "time grid is empty");
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!(g[k] >= 0) || (k > 0 && g[k] < g[k - 1])) throw ConfigError(key, "time grid must be non-negative and sorted");
    }
    return g;
}

void Config::reject_unused() const
{
    for (const auto& [k, v] : kv_)
        if (!used_.count(k)) throw ConfigError(k, "unknown key for this experiment");
}

std::string Config::canonical() const
{
    std::string s;
    for (const auto& [k, v] : kv_) s += k + " = " + v + "\n";
    return s;
}

std::uint64_t Config::hash() const { return fnv1a64(canonical()); }

} // namespace kaclab
