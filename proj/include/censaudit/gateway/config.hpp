#pragma once

#include "censaudit/gateway/gateway.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace censaudit::gateway {

// Run configuration file (JSON). Relative paths resolve against the file's
// directory. Example:
//   { "output_dir": "out", "cache_dir": "out/cache", "concurrency": 8, "seed": 7,
//     "retry": {"attempts": 3, "base_delay_ms": 1000},
//     "mock_scripts": {"r1": "scripts/r1.json"},
//     "models": [{"id": "r1", "role": "target", "endpoint": "mock:r1"}],
//     "curation": {...}, "audit": {...}, ... }
struct RunConfig {
  std::filesystem::path path;
  std::filesystem::path base_dir;
  std::string hash;  // sha256 of the file bytes
  json document;

  std::vector<ModelSpec> models;
  std::map<std::string, MockScript> scripts;
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> cache_dir;
  size_t concurrency = 8;
  uint64_t seed = 0;
  RetryPolicy retry;

  // Throws std::runtime_error when the file is missing or unparseable and
  // ConfigurationError when its content is invalid.
  static RunConfig load(const std::filesystem::path& file);
  static RunConfig from_json(const json& doc, const std::filesystem::path& base_dir);

  std::filesystem::path resolve(const std::string& p) const;
  json section(std::string_view name) const;

  const ModelSpec& model(std::string_view id) const;
  std::vector<ModelSpec> with_role(Role role) const;
  // The single model with `role`, or the one named by `preferred_id`.
  const ModelSpec& require_role(Role role, const std::string& preferred_id = {}) const;
};

std::unique_ptr<Gateway> make_gateway(const RunConfig& config);

}  // namespace censaudit::gateway
