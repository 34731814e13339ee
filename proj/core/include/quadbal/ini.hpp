#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace quadbal {

// Raised for malformed files and for unknown/unconsumed keys. Messages carry
// line numbers.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Hierarchical key-value config: "[section]" headers, "key = value" lines,
// '#' or ';' comments. Values are stored verbatim; typed getters parse on
// access. Every key is tracked so unknown keys can be rejected after the
// consumer has pulled everything it understands.
class Ini {
public:
    static Ini parse_file(const std::string& path);
    static Ini parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int64_t get_int(const std::string& section, const std::string& key, int64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

    // Key present in the file but never read through a getter -> error.
    void ensure_all_consumed() const;

    void set(const std::string& section, const std::string& key, const std::string& value);

    // Round-trips through parse_string (used for run-manifest snapshots).
    std::string to_string() const;

    const std::string& origin() const { return origin_; }

private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool consumed = false;
    };
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::string origin_;

    const Entry* find(const std::string& section, const std::string& key) const;
};

}  // namespace quadbal
