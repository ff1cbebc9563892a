#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zyg/errors.hpp"
#include "zyg/spec_string.hpp"

namespace zyg::cli {

/// One accepted key; an empty default with required = false means "auto".
struct KeySpec {
  std::string name;
  std::string fallback;
  std::string help;
  bool required = false;
};

struct CommandSchema {
  std::string name;
  std::string help;
  std::vector<KeySpec> keys;

  const KeySpec* find(const std::string& key) const {
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.name == key; });
    return it == keys.end() ? nullptr : &*it;
  }
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Flat `key = value` lines; `#` starts a comment.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigurationError("config line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigurationError("config line " + std::to_string(number) + ": empty key or value");
    }
    if (!out.emplace(key, value).second) {
      throw ConfigurationError("config line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

inline std::map<std::string, std::string> load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Defaults, then file values, then flags. Unknown keys and missing required keys are errors.
inline std::map<std::string, std::string> resolve(const CommandSchema& schema,
                                                  const std::map<std::string, std::string>& file,
                                                  const std::map<std::string, std::string>& flags) {
  std::map<std::string, std::string> out;
  for (const auto& k : schema.keys) {
    if (!k.fallback.empty()) out[k.name] = k.fallback;
  }
  for (const auto* layer : {&file, &flags}) {
    for (const auto& [key, value] : *layer) {
      if (key == "command") continue;
      if (!schema.find(key)) throw ConfigurationError("unknown key '" + key + "' for command '" + schema.name + "'");
      out[key] = value;
    }
  }
  for (const auto& k : schema.keys) {
    if (k.required && !out.contains(k.name)) {
      throw ConfigurationError("command '" + schema.name + "' needs key '" + k.name + "'");
    }
  }
  return out;
}

/// Typed access to a resolved configuration.
class Settings {
 public:
  explicit Settings(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  const std::map<std::string, std::string>& values() const { return values_; }
  bool has(const std::string& key) const { return values_.contains(key) && values_.at(key) != "auto"; }

  const std::string& text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigurationError("missing key '" + key + "'");
    return it->second;
  }

  double real(const std::string& key) const { return SpecString::to_real(key, text(key)); }

  std::optional<double> optional_real(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return real(key);
  }

  long integer(const std::string& key) const {
    SpecString s;
    s.values[key] = text(key);
    return s.integer(key, 0);
  }

  std::size_t count(const std::string& key) const {
    const long v = integer(key);
    if (v < 0) throw ConfigurationError("key '" + key + "' must be nonnegative");
    return static_cast<std::size_t>(v);
  }

  /// `;`-separated reals.
  std::vector<double> reals(const std::string& key) const {
    SpecString s;
    s.values[key] = text(key);
    return s.reals(key);
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace zyg::cli
