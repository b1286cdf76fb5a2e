#include "censaudit/gateway/http_backend.hpp"

#include <httplib.h>

#include <cstdlib>

namespace censaudit::gateway {

Url parse_url(const std::string& url) {
  Url u;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigurationError("endpoint is not a URL: " + url);
  u.scheme = url.substr(0, scheme_end);
  if (u.scheme != "http" && u.scheme != "https") {
    throw ConfigurationError("unsupported endpoint scheme: " + u.scheme);
  }
  auto rest = url.substr(scheme_end + 3);
  auto slash = rest.find('/');
  auto authority = rest.substr(0, slash);
  u.path = slash == std::string::npos ? "/" : rest.substr(slash);
  auto colon = authority.rfind(':');
  if (colon != std::string::npos) {
    u.host = authority.substr(0, colon);
    try {
      u.port = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigurationError("bad port in endpoint: " + url);
    }
  } else {
    u.host = authority;
    u.port = u.scheme == "https" ? 443 : 80;
  }
  if (u.host.empty()) throw ConfigurationError("endpoint has no host: " + url);
  return u;
}

std::string provider_family(const ModelSpec& model) {
  if (!model.provider.empty()) return model.provider;
  if (model.endpoint.find("anthropic.com") != std::string::npos) return "anthropic";
  return "openai";
}

json build_request_body(const ModelSpec& model, const ChatPrompt& prompt,
                        const GenerationParams& params) {
  const auto family = provider_family(model);
  const auto& name = model.remote_model.empty() ? model.id : model.remote_model;
  json body;
  body["model"] = name;
  body["temperature"] = params.temperature;
  body["max_tokens"] = params.max_tokens;
  if (family == "anthropic") {
    if (!prompt.system.empty()) body["system"] = prompt.system;
    body["messages"] = json::array({{{"role", "user"}, {"content", prompt.user}}});
  } else if (family == "openai") {
    json messages = json::array();
    if (!prompt.system.empty()) messages.push_back({{"role", "system"}, {"content", prompt.system}});
    messages.push_back({{"role", "user"}, {"content", prompt.user}});
    body["messages"] = std::move(messages);
    if (params.seed) body["seed"] = *params.seed;
  } else {
    throw ConfigurationError("unknown provider family: " + family);
  }
  return body;
}

std::string parse_response_body(const std::string& provider, const json& body) {
  try {
    if (provider == "anthropic") {
      std::string text;
      for (const auto& block : body.at("content")) {
        if (block.value("type", "") == "text") text += block.at("text").get<std::string>();
      }
      return text;
    }
    const auto& message = body.at("choices").at(0).at("message");
    std::string content = message.at("content").is_null() ? "" : message.at("content").get<std::string>();
    if (message.contains("reasoning_content") && message.at("reasoning_content").is_string()) {
      return "<think>" + message.at("reasoning_content").get<std::string>() + "</think>" + content;
    }
    return content;
  } catch (const json::exception& e) {
    throw ApiError(200, std::string("unexpected response shape: ") + e.what());
  }
}

std::string HttpBackend::send(const ModelSpec& model, const ChatPrompt& prompt,
                              const GenerationParams& params) {
  if (model.auth_ref.empty()) {
    throw ConfigurationError("model '" + model.id + "' has no auth_ref naming a credential env var");
  }
  const char* secret = std::getenv(model.auth_ref.c_str());
  if (secret == nullptr || *secret == '\0') {
    throw ConfigurationError("missing credential: set environment variable " + model.auth_ref +
                             " for model '" + model.id + "'");
  }
  const auto url = parse_url(model.endpoint);
  const auto family = provider_family(model);
  const auto body = build_request_body(model, prompt, params);

  httplib::Headers headers;
  if (family == "anthropic") {
    headers.emplace("x-api-key", secret);
    headers.emplace("anthropic-version", "2023-06-01");
  } else {
    headers.emplace("Authorization", std::string("Bearer ") + secret);
  }

  httplib::Client client(url.scheme + "://" + url.host + ":" + std::to_string(url.port));
  client.set_connection_timeout(std::chrono::seconds(30));
  client.set_read_timeout(read_timeout_);
  ++requests_;
  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("request to " + url.host + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status >= 500) {
    throw TransportError("server error " + std::to_string(res->status) + " from " + url.host);
  }
  if (res->status >= 400) {
    throw ApiError(res->status, "HTTP " + std::to_string(res->status) + " from " + url.host + ": " +
                                    res->body.substr(0, 500));
  }
  auto parsed = json::parse(res->body, nullptr, false);
  if (parsed.is_discarded()) throw ApiError(res->status, "response body is not JSON");
  return parse_response_body(family, parsed);
}

}  // namespace censaudit::gateway
