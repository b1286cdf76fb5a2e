#pragma once

#include "censaudit/gateway/cache.hpp"
#include "censaudit/gateway/http_backend.hpp"
#include "censaudit/gateway/mock_script.hpp"
#include "censaudit/gateway/types.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace censaudit::gateway {

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds base_delay{1000};  // doubled after each failed attempt
};

struct GatewayOptions {
  std::optional<std::filesystem::path> cache_dir;
  RetryPolicy retry;
  size_t default_concurrency = 8;
};

// Uniform chat-completion client. Safe for concurrent use.
class Gateway {
 public:
  explicit Gateway(GatewayOptions options = {});

  void add_script(const std::string& script_id, MockScript script);
  // Throws ConfigurationError on duplicate ids or mock endpoints without a script.
  void add_model(ModelSpec model);

  const ModelSpec& model(std::string_view id) const;
  bool has_model(std::string_view id) const;
  std::vector<ModelSpec> models_with_role(Role role) const;

  RawCompletion complete(const ModelSpec& model, const ChatPrompt& prompt,
                         const GenerationParams& params);
  RawCompletion complete(const ModelSpec& model, const std::string& user_prompt,
                         const GenerationParams& params) {
    return complete(model, ChatPrompt{{}, user_prompt}, params);
  }

  // Positionally aligned with `prompts`; per-slot failures never abort the batch.
  std::vector<SlotResult> complete_batch(const ModelSpec& model, const std::vector<ChatPrompt>& prompts,
                                         const GenerationParams& params, size_t concurrency_limit);

  MockBackend* mock(std::string_view script_id);
  size_t network_requests() const { return http_.requests_issued(); }
  size_t cache_hits() const { return cache_hits_.load(); }
  size_t default_concurrency() const { return options_.default_concurrency; }
  const ResponseCache& cache() const { return cache_; }

 private:
  Backend& backend_for(const ModelSpec& model);

  GatewayOptions options_;
  ResponseCache cache_;
  HttpBackend http_;
  std::map<std::string, std::unique_ptr<MockBackend>, std::less<>> mocks_;
  std::map<std::string, ModelSpec, std::less<>> models_;
  std::atomic<size_t> cache_hits_{0};
};

}  // namespace censaudit::gateway
