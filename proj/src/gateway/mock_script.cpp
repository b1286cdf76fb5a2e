#include "censaudit/gateway/mock_script.hpp"

#include "censaudit/assets.hpp"
#include "censaudit/text.hpp"

#include <chrono>
#include <thread>

namespace censaudit::gateway {

namespace {

std::vector<std::string> string_or_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  const auto& v = j.at(key);
  if (v.is_string()) {
    out.push_back(v.get<std::string>());
  } else if (v.is_array()) {
    for (const auto& s : v) out.push_back(s.get<std::string>());
  } else {
    throw ConfigurationError(std::string("mock rule field '") + key + "' must be string or list");
  }
  return out;
}

bool any_contains(std::string_view folded_text, const std::vector<std::string>& folded_needles) {
  for (const auto& n : folded_needles) {
    if (folded_text.find(n) != std::string_view::npos) return true;
  }
  return false;
}

}  // namespace

MockScript MockScript::from_json(const json& j) {
  MockScript s;
  if (!j.is_object()) throw ConfigurationError("mock script must be a JSON object");
  s.trigger = j.value("trigger", s.trigger);
  s.censored_response = j.value("censored_response", s.censored_response);
  s.latency_ms = j.value("latency_ms", int64_t{0});
  for (const auto& r : j.value("rules", json::array())) {
    MockRule rule;
    rule.contains = string_or_list(r, "contains");
    if (r.contains("regex")) rule.regex = r.at("regex").get<std::string>();
    rule.system_contains = string_or_list(r, "system_contains");
    if (r.contains("system_regex")) rule.system_regex = r.at("system_regex").get<std::string>();
    rule.response = r.value("response", std::string());
    if (r.contains("min_trigger_repetitions")) {
      const auto& m = r.at("min_trigger_repetitions");
      if (m.is_null() || (m.is_string() && m.get<std::string>() == "never")) {
        rule.min_trigger_repetitions = kNeverTrigger;
      } else {
        auto v = m.get<int64_t>();
        if (v < 0) throw ConfigurationError("min_trigger_repetitions must be >= 0");
        rule.min_trigger_repetitions = static_cast<size_t>(v);
      }
    }
    if (r.contains("censored_response")) rule.censored_response = r.at("censored_response").get<std::string>();
    if (r.contains("fail")) {
      rule.fail = r.at("fail").get<std::string>();
      if (*rule.fail != "transport" && *rule.fail != "api") {
        throw ConfigurationError("mock rule 'fail' must be 'transport' or 'api'");
      }
    }
    rule.fail_times = r.value("fail_times", size_t{0});
    if (r.contains("latency_ms")) rule.latency_ms = r.at("latency_ms").get<int64_t>();
    s.rules.push_back(std::move(rule));
  }
  return s;
}

json MockScript::to_json() const {
  json rules = json::array();
  for (const auto& r : this->rules) {
    json o;
    if (!r.contains.empty()) o["contains"] = r.contains;
    if (r.regex) o["regex"] = *r.regex;
    if (!r.system_contains.empty()) o["system_contains"] = r.system_contains;
    if (r.system_regex) o["system_regex"] = *r.system_regex;
    o["response"] = r.response;
    if (r.min_trigger_repetitions == kNeverTrigger) {
      o["min_trigger_repetitions"] = "never";
    } else {
      o["min_trigger_repetitions"] = r.min_trigger_repetitions;
    }
    if (r.censored_response) o["censored_response"] = *r.censored_response;
    if (r.fail) {
      o["fail"] = *r.fail;
      o["fail_times"] = r.fail_times;
    }
    if (r.latency_ms) o["latency_ms"] = *r.latency_ms;
    rules.push_back(std::move(o));
  }
  return json{{"trigger", trigger}, {"censored_response", censored_response},
              {"latency_ms", latency_ms}, {"rules", std::move(rules)}};
}

MockBackend::MockBackend(MockScript script)
    : script_(std::move(script)),
      rule_failures_(std::make_unique<std::atomic<size_t>[]>(script_.rules.size())) {
  for (size_t i = 0; i < script_.rules.size(); ++i) rule_failures_[i] = 0;
  for (const auto& r : script_.rules) {
    CompiledRule c;
    try {
      if (r.regex) c.user_re.emplace(*r.regex, std::regex::ECMAScript);
      if (r.system_regex) c.system_re.emplace(*r.system_regex, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw ConfigurationError(std::string("invalid mock rule regex: ") + e.what());
    }
    for (const auto& s : r.contains) c.contains_folded.push_back(text::fold(s));
    for (const auto& s : r.system_contains) c.system_contains_folded.push_back(text::fold(s));
    compiled_.push_back(std::move(c));
  }
}

std::vector<ChatPrompt> MockBackend::received() const {
  std::lock_guard lock(log_mu_);
  return log_;
}

void MockBackend::reset_instrumentation() {
  std::lock_guard lock(log_mu_);
  log_.clear();
  calls_ = 0;
  peak_in_flight_ = 0;
}

std::string MockBackend::send(const ModelSpec& model, const ChatPrompt& prompt,
                              const GenerationParams& /*params*/) {
  struct InFlight {
    MockBackend& b;
    explicit InFlight(MockBackend& be) : b(be) {
      size_t now = ++b.in_flight_;
      size_t peak = b.peak_in_flight_.load();
      while (now > peak && !b.peak_in_flight_.compare_exchange_weak(peak, now)) {
      }
    }
    ~InFlight() { --b.in_flight_; }
  } guard(*this);

  ++calls_;
  {
    std::lock_guard lock(log_mu_);
    log_.push_back(prompt);
  }

  const std::string user_folded = text::fold(prompt.user);
  const std::string system_folded = text::fold(prompt.system);

  for (size_t i = 0; i < script_.rules.size(); ++i) {
    const auto& rule = script_.rules[i];
    const auto& c = compiled_[i];
    if (!c.contains_folded.empty() && !any_contains(user_folded, c.contains_folded)) continue;
    if (!c.system_contains_folded.empty() && !any_contains(system_folded, c.system_contains_folded))
      continue;
    std::smatch m;
    if (c.user_re && !std::regex_search(prompt.user, m, *c.user_re)) continue;
    if (c.system_re && !std::regex_search(prompt.system, *c.system_re)) continue;

    int64_t latency = rule.latency_ms.value_or(script_.latency_ms);
    if (latency > 0) std::this_thread::sleep_for(std::chrono::milliseconds(latency));

    if (rule.fail) {
      size_t n = rule_failures_[i]++;
      if (rule.fail_times == 0 || n < rule.fail_times) {
        if (*rule.fail == "transport") throw TransportError("scripted transport failure");
        throw ApiError(400, "scripted api failure");
      }
    }

    if (rule.min_trigger_repetitions > 0) {
      size_t copies = text::count_occurrences(prompt.user, script_.trigger);
      if (rule.min_trigger_repetitions == kNeverTrigger || copies < rule.min_trigger_repetitions) {
        return rule.censored_response.value_or(script_.censored_response);
      }
    }

    std::map<std::string, std::string> values{{"user", prompt.user}, {"system", prompt.system}};
    if (c.user_re) {
      for (size_t g = 1; g < m.size() && g <= 9; ++g) values[std::to_string(g)] = m[g].str();
    }
    return assets::fill(rule.response, values);
  }
  throw ScriptError("mock script for model '" + model.id + "' has no rule matching prompt");
}

}  // namespace censaudit::gateway
