#include "censaudit/gateway/config.hpp"

#include "censaudit/hashing.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace censaudit::gateway {

RunConfig RunConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("config file not found: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto bytes = ss.str();
  auto doc = json::parse(bytes, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw std::runtime_error("config file is not a JSON object: " + file.string());
  }
  auto base = file.has_parent_path() ? file.parent_path() : std::filesystem::path(".");
  auto cfg = from_json(doc, base);
  cfg.path = file;
  cfg.hash = sha256_hex(bytes);
  return cfg;
}

RunConfig RunConfig::from_json(const json& doc, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  cfg.document = doc;
  cfg.hash = sha256_hex(doc.dump());
  try {
    const json scripts = doc.value("mock_scripts", json::object());
    for (const auto& [id, src] : scripts.items()) {
      if (src.is_string()) {
        std::ifstream in(cfg.resolve(src.get<std::string>()), std::ios::binary);
        if (!in) throw ConfigurationError("mock script file not found: " + src.get<std::string>());
        json sj = json::parse(in, nullptr, false);
        if (sj.is_discarded()) throw ConfigurationError("mock script is not JSON: " + src.get<std::string>());
        cfg.scripts.emplace(id, MockScript::from_json(sj));
      } else {
        cfg.scripts.emplace(id, MockScript::from_json(src));
      }
    }
    std::set<std::string> ids;
    for (const auto& m : doc.value("models", json::array())) {
      auto spec = model_from_json(m);
      if (!ids.insert(spec.id).second) throw ConfigurationError("duplicate model id: " + spec.id);
      if (spec.is_mock() && !cfg.scripts.count(spec.mock_script_id())) {
        throw ConfigurationError("model '" + spec.id + "' references unknown mock script '" +
                                 spec.mock_script_id() + "'");
      }
      cfg.models.push_back(std::move(spec));
    }
    cfg.output_dir = cfg.resolve(doc.value("output_dir", std::string("out")));
    if (doc.contains("cache_dir")) cfg.cache_dir = cfg.resolve(doc.at("cache_dir").get<std::string>());
    else cfg.cache_dir = cfg.output_dir / "cache";
    cfg.concurrency = doc.value("concurrency", size_t{8});
    if (cfg.concurrency == 0) throw ConfigurationError("concurrency must be >= 1");
    cfg.seed = doc.value("seed", uint64_t{0});
    if (doc.contains("retry")) {
      const auto& r = doc.at("retry");
      cfg.retry.attempts = r.value("attempts", 3);
      cfg.retry.base_delay = std::chrono::milliseconds(r.value("base_delay_ms", 1000));
    }
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("invalid config: ") + e.what());
  }
  return cfg;
}

std::filesystem::path RunConfig::resolve(const std::string& p) const {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

json RunConfig::section(std::string_view name) const {
  auto it = document.find(std::string(name));
  return it == document.end() ? json::object() : *it;
}

const ModelSpec& RunConfig::model(std::string_view id) const {
  for (const auto& m : models) {
    if (m.id == id) return m;
  }
  throw ConfigurationError("config has no model '" + std::string(id) + "'");
}

std::vector<ModelSpec> RunConfig::with_role(Role role) const {
  std::vector<ModelSpec> out;
  for (const auto& m : models) {
    if (m.role == role) out.push_back(m);
  }
  return out;
}

const ModelSpec& RunConfig::require_role(Role role, const std::string& preferred_id) const {
  if (!preferred_id.empty()) {
    const auto& m = model(preferred_id);
    if (m.role != role) {
      throw ConfigurationError("model '" + preferred_id + "' does not have role " +
                               std::string(to_string(role)));
    }
    return m;
  }
  const ModelSpec* found = nullptr;
  for (const auto& m : models) {
    if (m.role != role) continue;
    if (found) {
      throw ConfigurationError("several models have role " + std::string(to_string(role)) +
                               "; name one explicitly");
    }
    found = &m;
  }
  if (!found) throw ConfigurationError("config has no model with role " + std::string(to_string(role)));
  return *found;
}

std::unique_ptr<Gateway> make_gateway(const RunConfig& config) {
  GatewayOptions opts;
  opts.cache_dir = config.cache_dir;
  opts.retry = config.retry;
  opts.default_concurrency = config.concurrency;
  auto gw = std::make_unique<Gateway>(opts);
  for (const auto& [id, script] : config.scripts) gw->add_script(id, script);
  for (const auto& m : config.models) gw->add_model(m);
  return gw;
}

}  // namespace censaudit::gateway
