#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace blowup {

// TOML-like scenario text:
//
//   # comment
//   command = "verify-first-order"
//   [problem]
//   p = 2
//   alpha = -0.5
//   family_p = [2.0, 2.5, 3.0]
//   left = "symmetric"
//
// Values are numbers, booleans, double-quoted strings or flat numeric arrays.
// Keys before the first section header live in section "".
class Config {
public:
    using Value = std::variant<double, bool, std::string, std::vector<double>>;

    struct Entry {
        Value value;
        int line = 0;
    };

    static Config parse(const std::string& text, const std::string& origin = "<string>");
    static Config load(const std::string& path);

    const std::string& origin() const { return origin_; }
    const std::string& text() const { return text_; }

    bool has(const std::string& section, const std::string& key) const;
    bool has_section(const std::string& section) const;

    // Typed getters mark the key as consumed. Type mismatches raise ConfigError with the line.
    double number(const std::string& section, const std::string& key) const;
    double number(const std::string& section, const std::string& key, double fallback) const;
    std::optional<double> maybe_number(const std::string& section, const std::string& key) const;
    int integer(const std::string& section, const std::string& key, int fallback) const;
    bool boolean(const std::string& section, const std::string& key, bool fallback) const;
    std::string string(const std::string& section, const std::string& key) const;
    std::string string(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    std::vector<double> numbers(const std::string& section, const std::string& key,
                                const std::vector<double>& fallback) const;

    // Overrides "section.key=value" (comma separated), e.g. "tolerances.beta_rel=0.01".
    void apply_overrides(const std::string& spec);

    // Raises ConfigError naming every key that no getter touched.
    void reject_unknown() const;

    const std::map<std::string, std::map<std::string, Entry>>& sections() const { return data_; }

private:
    const Entry* find(const std::string& section, const std::string& key) const;
    [[noreturn]] void fail(const std::string& section, const std::string& key, const Entry& e,
                           const std::string& what) const;

    std::string origin_, text_;
    std::map<std::string, std::map<std::string, Entry>> data_;
    mutable std::set<std::pair<std::string, std::string>> used_;
};

}  // namespace blowup
