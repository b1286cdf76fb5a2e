#include "censaudit/curation/stages.hpp"
#include "censaudit/parallel.hpp"

#include <spdlog/spdlog.h>

#include <stdexcept>

namespace censaudit::curation {

namespace {

struct Probe {
  std::optional<classifier::CensorshipVerdict> verdict;
  std::string failure;
};

Probe probe(gateway::Gateway& gw, const gateway::ModelSpec& model, const Prompt& p,
            classifier::Classifier& classifier) {
  Probe out;
  try {
    auto raw = gw.complete(model, gateway::ChatPrompt{{}, p.text}, model.default_params);
    out.verdict = classifier.classify_raw(p.text, raw.text);
  } catch (const gateway::GatewayError& e) {
    out.failure = model.id + ": " + std::string(gateway::to_string(e.kind())) + " error: " + e.what();
  } catch (const classifier::ClassificationError& e) {
    out.failure = model.id + ": " + e.what();
  } catch (const classifier::JudgeFormatError& e) {
    out.failure = model.id + ": " + e.what();
  }
  return out;
}

}  // namespace

StageResult check_global_censorship(gateway::Gateway& gw, const std::vector<Prompt>& prompts,
                                    const std::vector<gateway::ModelSpec>& reference_pool,
                                    classifier::Classifier& classifier, size_t concurrency) {
  if (reference_pool.empty()) throw std::invalid_argument("global censorship check needs a reference pool");
  const size_t m = reference_pool.size();
  std::vector<Probe> probes(prompts.size() * m);
  bounded_for_each(probes.size(), concurrency, [&](size_t k) {
    probes[k] = probe(gw, reference_pool[k % m], prompts[k / m], classifier);
  });

  StageResult r;
  for (size_t i = 0; i < prompts.size(); ++i) {
    bool refused = false;
    std::string failures;
    for (size_t j = 0; j < m; ++j) {
      const auto& pr = probes[i * m + j];
      if (pr.verdict && pr.verdict->censored()) refused = true;
      if (!pr.verdict) failures += (failures.empty() ? "" : "; ") + pr.failure;
    }
    if (refused) continue;
    if (!failures.empty()) {
      r.needs_review.push_back({prompts[i], failures});
      continue;
    }
    r.prompts.push_back(prompts[i]);
  }
  r.report = make_report("global", prompts, r.prompts);
  for (const auto& item : r.needs_review) r.report.needs_review_ids.push_back(item.prompt.id);
  return r;
}

StageResult check_local_censorship(gateway::Gateway& gw, const std::vector<Prompt>& prompts,
                                   const gateway::ModelSpec& target, classifier::Classifier& classifier,
                                   size_t concurrency) {
  if (target.role != gateway::Role::target) {
    throw gateway::ConfigurationError("model '" + target.id + "' is not a target");
  }
  std::vector<Probe> probes(prompts.size());
  bounded_for_each(prompts.size(), concurrency,
                   [&](size_t i) { probes[i] = probe(gw, target, prompts[i], classifier); });

  StageResult r;
  for (size_t i = 0; i < prompts.size(); ++i) {
    const auto& pr = probes[i];
    if (!pr.verdict) {
      r.needs_review.push_back({prompts[i], pr.failure});
      continue;
    }
    const auto label = pr.verdict->label;
    if (label == classifier::Label::type1 || label == classifier::Label::type2) {
      auto kept = prompts[i];
      kept.verdict = pr.verdict;
      r.prompts.push_back(std::move(kept));
    }
  }
  r.report = make_report("local", prompts, r.prompts);
  for (const auto& item : r.needs_review) r.report.needs_review_ids.push_back(item.prompt.id);
  return r;
}

}  // namespace censaudit::curation
