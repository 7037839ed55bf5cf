#pragma once

// Record of one command-line run: enough to re-execute it on the same inputs.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <optional>
#include <string>
#include <vector>

#include "snowcast/params_io.hpp"
#include "snowcast/version.hpp"

namespace snowcast {

struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;  ///< argv after the program name
  std::vector<std::string> inputs;
  std::vector<std::string> parameter_files;
  std::vector<std::string> outputs;
  std::optional<std::uint64_t> seed;
  Json settings = Json::object();  ///< effective option values, defaults included
  std::string version = kVersion;
  std::string timestamp;  ///< UTC, ISO 8601; informational only
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline Json to_json(const RunManifest& m) {
  Json j = {{"command", m.command},
            {"arguments", m.arguments},
            {"inputs", m.inputs},
            {"parameter_files", m.parameter_files},
            {"outputs", m.outputs},
            {"settings", m.settings},
            {"version", m.version},
            {"timestamp", m.timestamp}};
  // Seeds are 64-bit; JSON readers that use doubles would round them.
  j["seed"] = m.seed ? Json(std::to_string(*m.seed)) : Json(nullptr);
  return j;
}

}  // namespace snowcast
