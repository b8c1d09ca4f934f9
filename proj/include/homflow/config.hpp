#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace homflow {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key=value configuration with [section] headers; a key inside a section
/// is addressed as "section.key". Later assignments win, so overlaying flag
/// overrides is a plain set().
class ConfigMap {
  public:
    static ConfigMap from_file(const std::string& path);
    static ConfigMap from_string(const std::string& text);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    const std::map<std::string, std::string>& items() const { return items_; }

  private:
    std::map<std::string, std::string> items_;
};

}  // namespace homflow
