#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string_view>
#include <string>
#include <vector>

namespace censaudit {

using json = nlohmann::json;

struct JsonlReadResult {
  std::vector<json> records;
  size_t total_lines = 0;    // non-blank lines
  size_t skipped_lines = 0;  // lines that failed to parse as a JSON object
};

// Reads one JSON object per line. Blank lines are ignored; malformed lines are
// counted, never thrown. A missing file throws std::runtime_error.
JsonlReadResult read_jsonl(const std::filesystem::path& path);

// Writes records to `path`, replacing any existing file.
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records);

// Append-only, line-flushed writer. Thread-safe.
class JsonlAppender {
 public:
  explicit JsonlAppender(const std::filesystem::path& path);

  void append(const json& record);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mu_;
  std::ofstream out_;
};

// Best-effort extraction of a JSON object or array from model output: the whole
// text, then a ``` fenced block, then the span from the first '{' / '[' to the
// last matching closer.
std::optional<json> extract_json(std::string_view text);

// Serializes with sorted keys (nlohmann default) and no extra whitespace.
std::string dump_compact(const json& j);

}  // namespace censaudit
