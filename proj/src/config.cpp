#include "blowup/config.hpp"

#include "blowup/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace blowup {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

[[noreturn]] void syntax(const std::string& origin, int line, const std::string& what) {
    throw Error(ErrorKind::ConfigError, origin + ":" + std::to_string(line) + ": " + what);
}

// Strips a trailing comment that is not inside a string.
std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

std::optional<double> parse_number(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    return true;
}

Config::Value parse_value(const std::string& raw, const std::string& origin, int line) {
    if (raw.empty()) syntax(origin, line, "missing value");
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"') syntax(origin, line, "unterminated string");
        return raw.substr(1, raw.size() - 2);
    }
    if (raw == "true") return true;
    if (raw == "false") return false;
    if (raw.front() == '[') {
        if (raw.back() != ']') syntax(origin, line, "unterminated array");
        std::vector<double> out;
        std::stringstream ss(raw.substr(1, raw.size() - 2));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            const auto v = parse_number(item);
            if (!v) syntax(origin, line, "array entries must be numbers, got '" + item + "'");
            out.push_back(*v);
        }
        return out;
    }
    if (const auto v = parse_number(raw)) return *v;
    syntax(origin, line, "cannot parse value '" + raw + "' (strings need double quotes)");
}

std::string qualified(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
    Config c;
    c.origin_ = origin;
    c.text_ = text;
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(strip_comment(raw));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') syntax(origin, line, "malformed section header");
            section = trim(s.substr(1, s.size() - 2));
            if (!valid_key(section)) syntax(origin, line, "invalid section name '" + section + "'");
            c.data_[section];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) syntax(origin, line, "expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        if (!valid_key(key)) syntax(origin, line, "invalid key '" + key + "'");
        auto& sec = c.data_[section];
        if (sec.count(key)) syntax(origin, line, "duplicate key '" + qualified(section, key) + "'");
        sec[key] = Entry{parse_value(trim(s.substr(eq + 1)), origin, line), line};
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
    const auto s = data_.find(section);
    if (s == data_.end()) return nullptr;
    const auto e = s->second.find(key);
    if (e == s->second.end()) return nullptr;
    used_.insert({section, key});
    return &e->second;
}

void Config::fail(const std::string& section, const std::string& key, const Entry& e,
                  const std::string& what) const {
    throw Error(ErrorKind::ConfigError, origin_ + ":" + std::to_string(e.line) + ": field '" +
                                            qualified(section, key) + "' " + what);
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto s = data_.find(section);
    return s != data_.end() && s->second.count(key);
}

bool Config::has_section(const std::string& section) const { return data_.count(section) > 0; }

double Config::number(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e)
        throw Error(ErrorKind::ConfigError,
                    origin_ + ": missing required field '" + qualified(section, key) + "'");
    if (const auto* v = std::get_if<double>(&e->value)) return *v;
    fail(section, key, *e, "must be a number");
}

double Config::number(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? number(section, key) : fallback;
}

std::optional<double> Config::maybe_number(const std::string& section, const std::string& key) const {
    if (!has(section, key)) return std::nullopt;
    return number(section, key);
}

int Config::integer(const std::string& section, const std::string& key, int fallback) const {
    if (!has(section, key)) return fallback;
    const double v = number(section, key);
    if (v != std::floor(v)) fail(section, key, *find(section, key), "must be an integer");
    return static_cast<int>(v);
}

bool Config::boolean(const std::string& section, const std::string& key, bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    if (const auto* v = std::get_if<bool>(&e->value)) return *v;
    fail(section, key, *e, "must be true or false");
}

std::string Config::string(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e)
        throw Error(ErrorKind::ConfigError,
                    origin_ + ": missing required field '" + qualified(section, key) + "'");
    if (const auto* v = std::get_if<std::string>(&e->value)) return *v;
    fail(section, key, *e, "must be a quoted string");
}

std::string Config::string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    return has(section, key) ? string(section, key) : fallback;
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    if (const auto* v = std::get_if<std::vector<double>>(&e->value)) return *v;
    if (const auto* v = std::get_if<double>(&e->value)) return {*v};
    fail(section, key, *e, "must be a numeric array");
}

void Config::apply_overrides(const std::string& spec) {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        const auto dot = item.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq)
            throw Error(ErrorKind::ConfigError,
                        "override '" + item + "' must look like section.key=value");
        const std::string section = trim(item.substr(0, dot));
        const std::string key = trim(item.substr(dot + 1, eq - dot - 1));
        if (!valid_key(section) || !valid_key(key))
            throw Error(ErrorKind::ConfigError, "override '" + item + "' has an invalid name");
        data_[section][key] = Entry{parse_value(trim(item.substr(eq + 1)), "--tolerance-overrides", 0), 0};
    }
}

void Config::reject_unknown() const {
    std::string bad;
    for (const auto& [section, entries] : data_)
        for (const auto& [key, e] : entries)
            if (!used_.count({section, key})) {
                if (!bad.empty()) bad += ", ";
                bad += "'" + qualified(section, key) + "' (line " + std::to_string(e.line) + ")";
            }
    if (!bad.empty()) throw Error(ErrorKind::ConfigError, origin_ + ": unknown keys " + bad);
}

}  // namespace blowup
