#include "homflow/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace homflow {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

ConfigMap ConfigMap::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return from_string(text.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

ConfigMap ConfigMap::from_string(const std::string& text) {
    ConfigMap cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: unterminated section header at line " +
                                  std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key=value at line " +
                              std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config: empty key at line " + std::to_string(lineno));
        cfg.set(section.empty() ? key : section + "." + key, value);
    }
    return cfg;
}

void ConfigMap::set(const std::string& key, const std::string& value) {
    items_[key] = value;
}

bool ConfigMap::has(const std::string& key) const {
    return items_.count(key) != 0;
}

std::string ConfigMap::get(const std::string& key,
                           const std::string& fallback) const {
    const auto it = items_.find(key);
    return it == items_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
    const auto it = items_.find(key);
    if (it == items_.end()) return fallback;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0')
        throw ConfigError("config: key '" + key + "' is not a number: " +
                          it->second);
    return v;
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
    const auto it = items_.find(key);
    if (it == items_.end()) return fallback;
    char* end = nullptr;
    const long v = std::strtol(it->second.c_str(), &end, 10);
    if (end == it->second.c_str() || *end != '\0')
        throw ConfigError("config: key '" + key + "' is not an integer: " +
                          it->second);
    return static_cast<int>(v);
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
    const auto it = items_.find(key);
    if (it == items_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config: key '" + key + "' is not a boolean: " + v);
}

}  // namespace homflow
