#include "censaudit/jailbreak/jailbreak.hpp"

#include "censaudit/jsonl.hpp"
#include "censaudit/parallel.hpp"

#include <spdlog/spdlog.h>

#include <memory>
#include <sstream>

namespace censaudit::jailbreak {

void JailbreakConfig::validate() const {
  if (trigger.empty()) throw std::invalid_argument("jailbreak trigger must be non-empty");
  if (open_delim.empty()) throw std::invalid_argument("jailbreak open delimiter must be non-empty");
  if (max_iterations < 1) throw std::invalid_argument("jailbreak max_iterations must be >= 1");
}

json to_json(const JailbreakConfig& c) {
  return {{"trigger", c.trigger},
          {"open_delim", c.open_delim},
          {"max_iterations", c.max_iterations},
          {"separator", c.separator},
          {"min_reasoning_chars", c.min_reasoning_chars}};
}

JailbreakConfig jailbreak_config_from_json(const json& j, JailbreakConfig c) {
  c.trigger = j.value("trigger", c.trigger);
  c.open_delim = j.value("open_delim", c.open_delim);
  c.max_iterations = j.value("max_iterations", c.max_iterations);
  c.separator = j.value("separator", c.separator);
  c.min_reasoning_chars = j.value("min_reasoning_chars", c.min_reasoning_chars);
  return c;
}

std::string_view to_string(BypassStatus s) { return s == BypassStatus::bypassed ? "bypassed" : "failed"; }

json to_json(const BypassOutcome& o) {
  json j{{"kind", "jailbreak"},
         {"prompt_id", o.prompt_id},
         {"model_id", o.model_id},
         {"question", o.question},
         {"status", to_string(o.status)},
         {"iterations_used", o.iterations_used},
         {"prompts_sent", o.prompts_sent}};
  if (o.final_verdict) j["final_verdict"] = classifier::to_json(*o.final_verdict);
  if (o.completion) {
    j["completion"] = {{"raw", o.completion->raw}, {"final", o.completion->final}};
    j["completion"]["reasoning"] = o.completion->reasoning ? json(*o.completion->reasoning) : json(nullptr);
  }
  if (o.error) j["error"] = *o.error;
  return j;
}

BypassOutcome bypass_outcome_from_json(const json& j) {
  if (j.value("kind", "") != "jailbreak") throw std::invalid_argument("not a jailbreak record");
  BypassOutcome o;
  o.prompt_id = j.at("prompt_id").get<std::string>();
  o.model_id = j.value("model_id", "");
  o.question = j.value("question", "");
  o.status = j.value("status", "failed") == "bypassed" ? BypassStatus::bypassed : BypassStatus::failed;
  o.iterations_used = j.value("iterations_used", 0);
  o.prompts_sent = j.value("prompts_sent", std::vector<std::string>{});
  if (j.contains("final_verdict")) o.final_verdict = classifier::verdict_from_json(j.at("final_verdict"));
  if (j.contains("completion")) {
    const auto& c = j.at("completion");
    Completion comp;
    comp.raw = c.value("raw", "");
    comp.final = c.value("final", "");
    if (c.contains("reasoning") && c.at("reasoning").is_string()) comp.reasoning = c.at("reasoning").get<std::string>();
    o.completion = comp;
  }
  if (j.contains("error") && j.at("error").is_string()) o.error = j.at("error").get<std::string>();
  return o;
}

std::string attack_prompt(std::string_view prompt, const JailbreakConfig& cfg, int copies) {
  std::string out(prompt);
  const auto attack = cfg.attack_string();
  for (int i = 0; i < copies; ++i) {
    out += cfg.separator;
    out += attack;
  }
  return out;
}

BypassOutcome run_jailbreak(gateway::Gateway& gw, std::string_view prompt, const gateway::ModelSpec& target,
                            const JailbreakConfig& cfg, classifier::Classifier& classifier) {
  cfg.validate();
  if (prompt.empty()) throw std::invalid_argument("jailbreak prompt must be non-empty");
  BypassOutcome o;
  o.prompt_id = curation::prompt_id(prompt);
  o.model_id = target.id;
  o.question = std::string(prompt);

  for (int i = 1; i <= cfg.max_iterations; ++i) {
    auto sent = attack_prompt(prompt, cfg, i);
    o.prompts_sent.push_back(sent);
    o.iterations_used = i;
    std::string raw;
    try {
      raw = gw.complete(target, gateway::ChatPrompt{{}, sent}, target.default_params).text;
    } catch (const gateway::GatewayError& e) {
      throw JailbreakError("target '" + target.id + "' unavailable: " + e.what());
    }
    Completion c;
    try {
      c = parse_completion(raw, classifier.delimiters());
    } catch (const MalformedCompletionError&) {
      o.completion.reset();
      o.final_verdict.reset();
      continue;
    }
    o.completion = c;
    try {
      o.final_verdict = classifier.classify(std::string(prompt), c);
    } catch (const std::exception& e) {
      spdlog::warn("jailbreak: classification failed for {}: {}", o.prompt_id, e.what());
      o.final_verdict.reset();
    }
    if (has_substantive_reasoning(c, cfg.min_reasoning_chars)) {
      o.status = BypassStatus::bypassed;
      return o;
    }
  }
  o.status = BypassStatus::failed;
  return o;
}

CampaignSummary summarize(const std::vector<BypassOutcome>& outcomes, int max_iterations) {
  CampaignSummary s;
  s.max_iterations = max_iterations;
  for (const auto& o : outcomes) {
    if (o.error) {
      ++s.errors;
      continue;
    }
    ++s.total;
    const auto label = o.final_verdict ? o.final_verdict->label : classifier::Label::not_censored;
    if (o.final_verdict) {
      switch (label) {
        case classifier::Label::type1: ++s.type1; break;
        case classifier::Label::type2: ++s.type2; break;
        case classifier::Label::type3: ++s.type3; break;
        case classifier::Label::not_censored: ++s.not_censored; break;
      }
    }
    if (o.status == BypassStatus::bypassed) {
      ++s.bypassed;
      ++s.histogram[o.iterations_used];
      if (o.final_verdict && label == classifier::Label::not_censored) ++s.bypassed_uncensored;
    } else {
      ++s.failed;
    }
  }
  s.bypass_rate = s.total ? static_cast<double>(s.bypassed_uncensored) / static_cast<double>(s.total) : 0.0;
  return s;
}

json to_json(const CampaignSummary& s) {
  json hist = json::object();
  for (const auto& [k, v] : s.histogram) hist[std::to_string(k)] = v;
  return {{"total", s.total},
          {"bypassed", s.bypassed},
          {"bypassed_uncensored", s.bypassed_uncensored},
          {"failed", s.failed},
          {"errors", s.errors},
          {"type1", s.type1},
          {"type2", s.type2},
          {"type3", s.type3},
          {"not_censored", s.not_censored},
          {"bypass_rate", s.bypass_rate},
          {"max_iterations", s.max_iterations},
          {"histogram", hist}};
}

std::string histogram_csv(const CampaignSummary& s) {
  std::ostringstream os;
  os << "iterations,bypassed\n";
  for (int i = 1; i <= s.max_iterations; ++i) {
    auto it = s.histogram.find(i);
    os << i << ',' << (it == s.histogram.end() ? 0 : it->second) << '\n';
  }
  return os.str();
}

CampaignResult bypass_campaign(gateway::Gateway& gw, const std::vector<curation::Prompt>& dataset,
                               const gateway::ModelSpec& target, const JailbreakConfig& cfg,
                               classifier::Classifier& classifier, const CampaignOptions& opts) {
  cfg.validate();
  CampaignResult result;
  result.outcomes.resize(dataset.size());
  std::vector<uint8_t> done(dataset.size(), 0);

  std::unique_ptr<JsonlAppender> journal;
  if (opts.journal) {
    std::map<std::string, BypassOutcome> prior;
    if (std::filesystem::exists(*opts.journal)) {
      for (const auto& j : read_jsonl(*opts.journal).records) {
        try {
          auto o = bypass_outcome_from_json(j);
          if (!o.error && o.model_id == target.id) prior.insert_or_assign(o.prompt_id, std::move(o));
        } catch (const std::exception&) {
        }
      }
    }
    for (size_t i = 0; i < dataset.size(); ++i) {
      auto it = prior.find(dataset[i].id);
      if (it == prior.end()) continue;
      const auto& o = it->second;
      const bool same_attack = !o.prompts_sent.empty() && o.prompts_sent.front() == attack_prompt(dataset[i].text, cfg, 1);
      const bool complete = o.iterations_used <= cfg.max_iterations &&
                            (o.status == BypassStatus::bypassed || o.iterations_used == cfg.max_iterations);
      if (same_attack && complete) {
        result.outcomes[i] = o;
        done[i] = 1;
      }
    }
    if (opts.journal->has_parent_path()) std::filesystem::create_directories(opts.journal->parent_path());
    journal = std::make_unique<JsonlAppender>(*opts.journal);
  }

  std::vector<size_t> todo;
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (!done[i]) todo.push_back(i);
  }
  bounded_for_each(todo.size(), opts.concurrency, [&](size_t k) {
    const size_t i = todo[k];
    BypassOutcome o;
    try {
      o = run_jailbreak(gw, dataset[i].text, target, cfg, classifier);
    } catch (const std::exception& e) {
      o.model_id = target.id;
      o.question = dataset[i].text;
      o.error = e.what();
    }
    o.prompt_id = dataset[i].id;
    result.outcomes[i] = o;
    if (journal) journal->append(to_json(o));
  });
  result.summary = summarize(result.outcomes, cfg.max_iterations);
  return result;
}

}  // namespace censaudit::jailbreak
