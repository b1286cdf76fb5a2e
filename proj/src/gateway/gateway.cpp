#include "censaudit/gateway/gateway.hpp"

#include "censaudit/parallel.hpp"

#include <spdlog/spdlog.h>

#include <thread>

namespace censaudit::gateway {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::target: return "target";
    case Role::reference: return "reference";
    case Role::judge: return "judge";
    case Role::translator: return "translator";
    case Role::generator: return "generator";
  }
  return "target";
}

Role role_from_string(std::string_view s) {
  if (s == "target") return Role::target;
  if (s == "reference") return Role::reference;
  if (s == "judge") return Role::judge;
  if (s == "translator") return Role::translator;
  if (s == "generator") return Role::generator;
  throw ConfigurationError("unknown model role: " + std::string(s));
}

std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::transport: return "transport";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::script: return "script";
    case ErrorKind::api: return "api";
  }
  return "transport";
}

json to_json(const GenerationParams& p) {
  json j{{"temperature", p.temperature}, {"max_tokens", p.max_tokens}};
  j["seed"] = p.seed ? json(*p.seed) : json(nullptr);
  return j;
}

GenerationParams params_from_json(const json& j, const GenerationParams& defaults) {
  GenerationParams p = defaults;
  if (!j.is_object()) return p;
  p.temperature = j.value("temperature", p.temperature);
  p.max_tokens = j.value("max_tokens", p.max_tokens);
  if (j.contains("seed") && !j.at("seed").is_null()) p.seed = j.at("seed").get<int64_t>();
  if (p.temperature < 0) throw ConfigurationError("temperature must be >= 0");
  if (p.max_tokens <= 0) throw ConfigurationError("max_tokens must be positive");
  return p;
}

json to_json(const ModelSpec& m) {
  json j{{"id", m.id}, {"role", to_string(m.role)}, {"endpoint", m.endpoint},
         {"auth_ref", m.auth_ref}, {"default_params", to_json(m.default_params)}};
  if (!m.provider.empty()) j["provider"] = m.provider;
  if (!m.remote_model.empty()) j["model"] = m.remote_model;
  return j;
}

ModelSpec model_from_json(const json& j) {
  ModelSpec m;
  try {
    m.id = j.at("id").get<std::string>();
    m.role = role_from_string(j.at("role").get<std::string>());
    m.endpoint = j.at("endpoint").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("model entry missing field: ") + e.what());
  }
  m.auth_ref = j.value("auth_ref", "");
  m.provider = j.value("provider", "");
  m.remote_model = j.value("model", "");
  m.default_params = params_from_json(j.value("default_params", json::object()));
  if (m.id.empty()) throw ConfigurationError("model id must be non-empty");
  return m;
}

Gateway::Gateway(GatewayOptions options)
    : options_(std::move(options)), cache_(options_.cache_dir) {}

void Gateway::add_script(const std::string& script_id, MockScript script) {
  mocks_[script_id] = std::make_unique<MockBackend>(std::move(script));
}

void Gateway::add_model(ModelSpec model) {
  if (models_.count(model.id)) throw ConfigurationError("duplicate model id: " + model.id);
  if (model.is_mock() && !mocks_.count(model.mock_script_id())) {
    throw ConfigurationError("model '" + model.id + "' uses unregistered mock script '" +
                             model.mock_script_id() + "'");
  }
  auto id = model.id;
  models_.emplace(std::move(id), std::move(model));
}

const ModelSpec& Gateway::model(std::string_view id) const {
  auto it = models_.find(id);
  if (it == models_.end()) throw ConfigurationError("unknown model id: " + std::string(id));
  return it->second;
}

bool Gateway::has_model(std::string_view id) const { return models_.find(id) != models_.end(); }

std::vector<ModelSpec> Gateway::models_with_role(Role role) const {
  std::vector<ModelSpec> out;
  for (const auto& [id, m] : models_) {
    if (m.role == role) out.push_back(m);
  }
  return out;
}

MockBackend* Gateway::mock(std::string_view script_id) {
  auto it = mocks_.find(script_id);
  return it == mocks_.end() ? nullptr : it->second.get();
}

Backend& Gateway::backend_for(const ModelSpec& model) {
  if (model.is_mock()) {
    auto* m = mock(model.mock_script_id());
    if (m == nullptr) {
      throw ConfigurationError("no mock script registered for '" + model.mock_script_id() + "'");
    }
    return *m;
  }
  return http_;
}

RawCompletion Gateway::complete(const ModelSpec& model, const ChatPrompt& prompt,
                                const GenerationParams& params) {
  const auto key = cache_key(model.id, prompt, params);
  if (auto hit = cache_.lookup(key)) {
    ++cache_hits_;
    return RawCompletion{hit->text, model.id, hit->latency_ms, true};
  }
  Backend& backend = backend_for(model);
  auto delay = options_.retry.base_delay;
  const int attempts = std::max(1, options_.retry.attempts);
  for (int attempt = 1;; ++attempt) {
    auto start = std::chrono::steady_clock::now();
    try {
      auto text = backend.send(model, prompt, params);
      auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
      auto stored = cache_.insert(key, CacheEntry{model.id, std::move(text), latency});
      return RawCompletion{std::move(stored.text), model.id, stored.latency_ms, false};
    } catch (const TransportError& e) {
      if (attempt >= attempts) throw;
      spdlog::warn("model {}: attempt {}/{} failed ({}); retrying in {} ms", model.id, attempt,
                   attempts, e.what(), delay.count());
      if (delay.count() > 0) std::this_thread::sleep_for(delay);
      delay *= 2;
    }
  }
}

std::vector<SlotResult> Gateway::complete_batch(const ModelSpec& model,
                                                const std::vector<ChatPrompt>& prompts,
                                                const GenerationParams& params,
                                                size_t concurrency_limit) {
  if (concurrency_limit == 0) throw ConfigurationError("concurrency_limit must be >= 1");
  std::vector<SlotResult> results(prompts.size());
  bounded_for_each(prompts.size(), concurrency_limit, [&](size_t i) {
    try {
      results[i].completion = complete(model, prompts[i], params);
    } catch (const GatewayError& e) {
      results[i].error = SlotError{e.kind(), e.what()};
    } catch (const std::exception& e) {
      results[i].error = SlotError{ErrorKind::api, e.what()};
    }
  });
  return results;
}

}  // namespace censaudit::gateway
