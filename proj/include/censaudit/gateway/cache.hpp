#pragma once

#include "censaudit/gateway/types.hpp"

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

namespace censaudit::gateway {

std::string cache_key(const std::string& model_id, const ChatPrompt& prompt,
                      const GenerationParams& params);

struct CacheEntry {
  std::string model_id;
  std::string text;
  int64_t latency_ms = 0;
};

// Content-addressed completion store. With a directory, entries are persisted to
// an append-only journal (completions.jsonl) that is replayed on open. Writes are
// serialized; the first entry stored under a key wins.
class ResponseCache {
 public:
  explicit ResponseCache(std::optional<std::filesystem::path> dir = std::nullopt);

  std::optional<CacheEntry> lookup(const std::string& key) const;
  CacheEntry insert(const std::string& key, CacheEntry entry);

  size_t size() const;
  size_t skipped_on_load() const { return skipped_on_load_; }
  std::optional<std::filesystem::path> journal_path() const;

 private:
  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, CacheEntry> entries_;
  std::ofstream journal_;
  size_t skipped_on_load_ = 0;
};

}  // namespace censaudit::gateway
