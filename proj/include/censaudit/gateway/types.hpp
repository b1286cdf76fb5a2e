#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace censaudit::gateway {

using json = nlohmann::json;

enum class Role { target, reference, judge, translator, generator };

std::string_view to_string(Role r);
Role role_from_string(std::string_view s);

struct GenerationParams {
  double temperature = 0.0;
  int max_tokens = 2048;
  std::optional<int64_t> seed;

  bool operator==(const GenerationParams&) const = default;
};

json to_json(const GenerationParams& p);
GenerationParams params_from_json(const json& j, const GenerationParams& defaults = {});

// Provider-agnostic request shape: one system message, one user message.
struct ChatPrompt {
  std::string system;
  std::string user;
};

struct ModelSpec {
  std::string id;
  Role role = Role::target;
  // Full chat-completion URL, or "mock:<script-id>".
  std::string endpoint;
  // Name of the environment variable holding the credential. Never the secret.
  std::string auth_ref;
  // Adapter family for HTTP endpoints: "openai" (OpenAI-compatible) or "anthropic".
  std::string provider;
  // Remote model name sent on the wire; defaults to id.
  std::string remote_model;
  GenerationParams default_params;

  bool is_mock() const { return endpoint.rfind("mock:", 0) == 0; }
  std::string mock_script_id() const { return is_mock() ? endpoint.substr(5) : std::string(); }
};

json to_json(const ModelSpec& m);
ModelSpec model_from_json(const json& j);

struct RawCompletion {
  std::string text;
  std::string model_id;
  int64_t latency_ms = 0;
  bool from_cache = false;
};

enum class ErrorKind { transport, configuration, script, api };

std::string_view to_string(ErrorKind k);

class GatewayError : public std::runtime_error {
 public:
  GatewayError(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }
  bool retriable() const { return kind_ == ErrorKind::transport; }

 private:
  ErrorKind kind_;
};

// Connection failures and 5xx-class responses. Retried by the gateway.
class TransportError : public GatewayError {
 public:
  explicit TransportError(const std::string& what) : GatewayError(ErrorKind::transport, what) {}
};

class ConfigurationError : public GatewayError {
 public:
  explicit ConfigurationError(const std::string& what)
      : GatewayError(ErrorKind::configuration, what) {}
};

class ScriptError : public GatewayError {
 public:
  explicit ScriptError(const std::string& what) : GatewayError(ErrorKind::script, what) {}
};

// Non-retriable HTTP failure (4xx) or an unparseable provider response.
class ApiError : public GatewayError {
 public:
  ApiError(int status, const std::string& what) : GatewayError(ErrorKind::api, what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct SlotError {
  ErrorKind kind;
  std::string message;
};

// One batch slot: exactly one of completion / error is set.
struct SlotResult {
  std::optional<RawCompletion> completion;
  std::optional<SlotError> error;

  bool ok() const { return completion.has_value(); }
};

}  // namespace censaudit::gateway
