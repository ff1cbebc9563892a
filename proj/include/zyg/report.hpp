#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "zyg/errors.hpp"
#include "zyg/serialize.hpp"

namespace zyg {

/// Writes to a sibling temporary file and renames it over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline constexpr const char* kTimestampKey = "generated_at";

/// Report header: the fully resolved configuration plus the one volatile field.
inline Json report_header(const std::string& command, const std::map<std::string, std::string>& config) {
  Json cfg = Json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  return Json{{"tool", "zyglab"}, {"command", command}, {"config", cfg}, {kTimestampKey, utc_timestamp()}};
}

/// Copy of a report without the timestamp, for reproducibility comparisons.
inline Json without_timestamp(Json report) {
  if (report.contains("header")) report["header"].erase(kTimestampKey);
  return report;
}

}  // namespace zyg
