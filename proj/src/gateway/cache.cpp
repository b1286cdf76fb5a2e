#include "censaudit/gateway/cache.hpp"

#include "censaudit/hashing.hpp"
#include "censaudit/jsonl.hpp"

namespace censaudit::gateway {

std::string cache_key(const std::string& model_id, const ChatPrompt& prompt,
                      const GenerationParams& params) {
  json k = json::array({model_id, prompt.system, prompt.user, params.temperature,
                        params.max_tokens, params.seed ? json(*params.seed) : json(nullptr)});
  return sha256_hex(dump_compact(k));
}

ResponseCache::ResponseCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
  if (!dir_) return;
  std::filesystem::create_directories(*dir_);
  auto path = *dir_ / "completions.jsonl";
  if (std::filesystem::exists(path)) {
    auto loaded = read_jsonl(path);
    skipped_on_load_ = loaded.skipped_lines;
    for (const auto& r : loaded.records) {
      if (!r.contains("key") || !r.contains("text")) {
        ++skipped_on_load_;
        continue;
      }
      entries_.try_emplace(r.at("key").get<std::string>(),
                           CacheEntry{r.value("model_id", ""), r.at("text").get<std::string>(),
                                      r.value("latency_ms", int64_t{0})});
    }
  }
  journal_.open(path, std::ios::binary | std::ios::app);
}

std::optional<CacheEntry> ResponseCache::lookup(const std::string& key) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

CacheEntry ResponseCache::insert(const std::string& key, CacheEntry entry) {
  std::unique_lock lock(mu_);
  auto [it, inserted] = entries_.try_emplace(key, std::move(entry));
  if (inserted && journal_.is_open()) {
    json line{{"key", key}, {"model_id", it->second.model_id}, {"text", it->second.text},
              {"latency_ms", it->second.latency_ms}};
    journal_ << dump_compact(line) << '\n';
    journal_.flush();
  }
  return it->second;
}

size_t ResponseCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

std::optional<std::filesystem::path> ResponseCache::journal_path() const {
  if (!dir_) return std::nullopt;
  return *dir_ / "completions.jsonl";
}

}  // namespace censaudit::gateway
