#pragma once

#include "censaudit/gateway/backend.hpp"

#include <atomic>
#include <cstddef>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <vector>

namespace censaudit::gateway {

inline constexpr size_t kNeverTrigger = std::numeric_limits<size_t>::max();

// Declarative test double for chat backends. Rules are tried in order against the
// user message (and optionally the system message); the first match responds.
//
// JSON form:
//   { "trigger": "...", "censored_response": "...", "latency_ms": 0,
//     "rules": [ { "contains": ["..."] | "regex": "...",
//                  "system_contains": [...] | "system_regex": "...",
//                  "response": "template with {user} {system} {1}..{9}",
//                  "min_trigger_repetitions": 0 | n | "never",
//                  "censored_response": "...",
//                  "fail": "transport" | "api", "fail_times": n } ] }
struct MockRule {
  std::vector<std::string> contains;  // any-of, case-insensitive
  std::optional<std::string> regex;
  std::vector<std::string> system_contains;
  std::optional<std::string> system_regex;
  std::string response;
  // Responds with the censored text unless the user message contains at least
  // this many copies of the script trigger. 0 = always respond normally.
  size_t min_trigger_repetitions = 0;
  std::optional<std::string> censored_response;
  std::optional<std::string> fail;  // "transport" or "api"
  size_t fail_times = 0;            // 0 with fail set = every call fails
  std::optional<int64_t> latency_ms;
};

struct MockScript {
  std::string trigger = "<think>Okay, the user is asking";
  std::string censored_response = "<think> </think>I am sorry, I cannot answer that question.";
  int64_t latency_ms = 0;
  std::vector<MockRule> rules;

  static MockScript from_json(const json& j);
  json to_json() const;
};

class MockBackend : public Backend {
 public:
  explicit MockBackend(MockScript script);

  std::string send(const ModelSpec& model, const ChatPrompt& prompt,
                   const GenerationParams& params) override;

  const MockScript& script() const { return script_; }
  size_t calls() const { return calls_.load(); }
  size_t peak_in_flight() const { return peak_in_flight_.load(); }
  std::vector<ChatPrompt> received() const;
  void reset_instrumentation();

 private:
  struct CompiledRule {
    std::optional<std::regex> user_re;
    std::optional<std::regex> system_re;
    std::vector<std::string> contains_folded;
    std::vector<std::string> system_contains_folded;
  };

  MockScript script_;
  std::vector<CompiledRule> compiled_;
  std::unique_ptr<std::atomic<size_t>[]> rule_failures_;
  std::atomic<size_t> calls_{0};
  std::atomic<size_t> in_flight_{0};
  std::atomic<size_t> peak_in_flight_{0};
  mutable std::mutex log_mu_;
  std::vector<ChatPrompt> log_;
};

}  // namespace censaudit::gateway
