#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "zyg/errors.hpp"

namespace zyg {

/// Parsed form of `family:key=value{,key=value}`.
struct SpecString {
  std::string family;
  std::map<std::string, std::string> values;

  static SpecString parse(std::string_view text) {
    SpecString out;
    const auto colon = text.find(':');
    out.family = std::string(text.substr(0, colon));
    if (out.family.empty()) throw ConfigurationError("spec string has no family: '" + std::string(text) + "'");
    if (colon == std::string_view::npos) return out;
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size()) {
        throw ConfigurationError("malformed key=value item '" + std::string(item) + "' in '" + std::string(text) + "'");
      }
      const std::string key(item.substr(0, eq));
      if (!out.values.emplace(key, std::string(item.substr(eq + 1))).second) {
        throw ConfigurationError("duplicate key '" + key + "' in '" + std::string(text) + "'");
      }
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
      if (rest.empty()) throw ConfigurationError("trailing comma in '" + std::string(text) + "'");
    }
    return out;
  }

  void require_only(const std::set<std::string>& allowed) const {
    for (const auto& [key, value] : values) {
      if (!allowed.contains(key)) throw ConfigurationError("unknown key '" + key + "' for family '" + family + "'");
    }
  }

  bool has(const std::string& key) const { return values.contains(key); }

  double real(const std::string& key, double fallback) const {
    const auto it = values.find(key);
    return it == values.end() ? fallback : to_real(key, it->second);
  }

  long integer(const std::string& key, long fallback) const {
    const auto it = values.find(key);
    if (it == values.end()) return fallback;
    long v = 0;
    const auto& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ConfigurationError("key '" + key + "' expects an integer, got '" + s + "'");
    }
    return v;
  }

  /// Semicolon-separated list of reals, e.g. `slope=3;-1`.
  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    const auto it = values.find(key);
    if (it == values.end()) return out;
    std::string_view rest = it->second;
    while (true) {
      const auto semi = rest.find(';');
      out.push_back(to_real(key, std::string(rest.substr(0, semi))));
      if (semi == std::string_view::npos) break;
      rest = rest.substr(semi + 1);
    }
    return out;
  }

  static double to_real(const std::string& key, const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ConfigurationError("key '" + key + "' expects a real number, got '" + s + "'");
    }
    return v;
  }
};

/// Shortest round-trip decimal form of a double.
inline std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace zyg
