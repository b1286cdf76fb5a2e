#pragma once

#include "censaudit/gateway/backend.hpp"

#include <atomic>
#include <chrono>
#include <string>

namespace censaudit::gateway {

struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string path;
};

Url parse_url(const std::string& url);

// "openai" unless the endpoint is an Anthropic host or the model entry names a provider.
std::string provider_family(const ModelSpec& model);

// Wire adapters, exposed for tests.
json build_request_body(const ModelSpec& model, const ChatPrompt& prompt,
                        const GenerationParams& params);
// Extracts the completion text. OpenAI-compatible responses that carry a separate
// `reasoning_content` field are re-joined as "<think>reasoning</think>content" so
// downstream parsing sees the same shape as a raw reasoning model.
std::string parse_response_body(const std::string& provider, const json& body);

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(std::chrono::seconds read_timeout = std::chrono::seconds(300))
      : read_timeout_(read_timeout) {}

  std::string send(const ModelSpec& model, const ChatPrompt& prompt,
                   const GenerationParams& params) override;

  size_t requests_issued() const { return requests_.load(); }

 private:
  std::chrono::seconds read_timeout_;
  std::atomic<size_t> requests_{0};
};

}  // namespace censaudit::gateway
