#include "quadbal/ini.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace quadbal {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

Ini Ini::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

Ini Ini::parse_string(const std::string& text, const std::string& origin) {
    Ini ini;
    ini.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
            }
            ini.sections_[section];
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        }
        auto& sec = ini.sections_[section];
        if (sec.count(key)) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
        sec[key] = Entry{value, lineno, false};
    }
    return ini;
}

const Ini::Entry* Ini::find(const std::string& section, const std::string& key) const {
    auto sit = sections_.find(section);
    if (sit == sections_.end()) return nullptr;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return nullptr;
    return &kit->second;
}

bool Ini::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

std::string Ini::get_string(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    e->consumed = true;
    return e->value;
}

double Ini::get_double(const std::string& section, const std::string& key, double fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    e->consumed = true;
    try {
        size_t pos = 0;
        const double v = std::stod(e->value, &pos);
        if (pos != e->value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": '" + key +
                          "' is not a number: " + e->value);
    }
}

int64_t Ini::get_int(const std::string& section, const std::string& key, int64_t fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    e->consumed = true;
    try {
        size_t pos = 0;
        const int64_t v = std::stoll(e->value, &pos);
        if (pos != e->value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": '" + key +
                          "' is not an integer: " + e->value);
    }
}

bool Ini::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    e->consumed = true;
    std::string v = e->value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": '" + key +
                      "' is not a boolean: " + e->value);
}

void Ini::ensure_all_consumed() const {
    std::string bad;
    for (const auto& [sec, keys] : sections_) {
        for (const auto& [key, e] : keys) {
            if (!e.consumed) {
                if (!bad.empty()) bad += "; ";
                bad += origin_ + ":" + std::to_string(e.line) + ": unknown key [" + sec + "] " + key;
            }
        }
    }
    if (!bad.empty()) throw ConfigError(bad);
}

void Ini::set(const std::string& section, const std::string& key, const std::string& value) {
    sections_[section][key] = Entry{value, 0, true};
}

std::string Ini::to_string() const {
    std::ostringstream out;
    for (const auto& [sec, keys] : sections_) {
        out << "[" << sec << "]\n";
        for (const auto& [key, e] : keys) out << key << " = " << e.value << "\n";
        out << "\n";
    }
    return out.str();
}

}  // namespace quadbal
