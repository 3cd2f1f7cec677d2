#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "traitlab/util/hash.hpp"

#ifndef TRAITLAB_VERSION
#define TRAITLAB_VERSION "0.0.0"
#endif

namespace traitlab::cli {

inline std::string utc_now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Every report and output sidecar embeds one of these. Two runs with equal
// manifests (timestamp aside) produce byte-identical results; pass a fixed
// --timestamp to make the whole artifact reproducible.
inline nlohmann::json make_manifest(
    const std::string& command, const nlohmann::json& config,
    const std::vector<std::pair<std::string, std::string>>& input_files,
    std::uint64_t seed, const std::string& timestamp) {
  nlohmann::json inputs = nlohmann::json::object();
  for (const auto& [path, label] : input_files)
    inputs[label.empty() ? path : label] = {
        {"path", path}, {"fnv1a64", to_hex(file_checksum(path))}};
  return {{"command", command},
          {"config", config},
          {"inputs", inputs},
          {"seed", seed},
          {"tool_version", TRAITLAB_VERSION},
          {"timestamp", timestamp.empty() ? utc_now_iso8601() : timestamp}};
}

} // namespace traitlab::cli
