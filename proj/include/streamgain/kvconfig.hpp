#pragma once

// Plain-text `key = value` configuration files. Blank lines and lines whose
// first non-space character is '#' are ignored.

#include <charconv>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "streamgain/csv.hpp"
#include "streamgain/error.hpp"

namespace streamgain {

class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text, const std::string& origin = "config") {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      auto trimmed = trim(line);
      if (trimmed.empty() || trimmed.front() == '#') continue;
      auto eq = trimmed.find('=');
      if (eq == std::string_view::npos)
        fail("config", origin + ":" + std::to_string(n) + ": expected key = value");
      auto key = std::string(trim(trimmed.substr(0, eq)));
      auto value = std::string(trim(trimmed.substr(eq + 1)));
      if (key.empty()) fail("config", origin + ":" + std::to_string(n) + ": empty key");
      if (cfg.values_.count(key)) fail("config", origin + ":" + std::to_string(n) + ": duplicate key " + key);
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static KeyValueConfig load(const std::filesystem::path& path) {
    return parse(read_text_file(path), path.filename().string());
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Keys not in `known` cause an error, so typos do not pass silently.
  void require_known(const std::set<std::string>& known) const {
    for (const auto& [k, v] : values_)
      if (!known.count(k)) fail("config", "unknown key '" + k + "'");
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return parse_number(it->second);
    } catch (const Error&) {
      fail("config", "key '" + key + "': not a number: " + it->second);
    }
  }

  template <typename Int>
  Int get_int(const std::string& key, Int fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    Int v{};
    const auto& s = it->second;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      fail("config", "key '" + key + "': not an integer: " + s);
    return v;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
    if (it->second == "false" || it->second == "0" || it->second == "no") return false;
    fail("config", "key '" + key + "': not a boolean: " + it->second);
  }

  std::vector<std::string> get_list(const std::string& key) const {
    std::vector<std::string> out;
    auto it = values_.find(key);
    if (it == values_.end()) return out;
    for (auto& item : split_csv_line(it->second)) {
      auto t = std::string(trim(item));
      if (!t.empty()) out.push_back(t);
    }
    return out;
  }

  static std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace streamgain
