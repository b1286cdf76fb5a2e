#include "censaudit/assets.hpp"
#include "censaudit/audit/audit.hpp"
#include "censaudit/jsonl.hpp"
#include "censaudit/parallel.hpp"
#include "censaudit/text.hpp"

#include <spdlog/spdlog.h>

#include <map>
#include <memory>
#include <stdexcept>

namespace censaudit::audit {

AuditItem item_from_prompt(const curation::Prompt& p) {
  AuditItem it;
  it.prompt_id = p.id;
  it.text = p.text;
  it.language = p.language.value_or("en");
  it.category = p.category;
  it.source = std::string(curation::to_string(p.source));
  return it;
}

namespace {

AuditRecord base_record(const AuditItem& item, const gateway::ModelSpec& target,
                        const gateway::GenerationParams& params) {
  AuditRecord r;
  r.prompt_id = item.prompt_id;
  r.model_id = target.id;
  r.params = params;
  r.prompt_sent = item.text;
  r.language = item.language;
  r.task_mode = item.task_mode;
  r.category = item.category;
  r.source = item.source;
  return r;
}

AuditRecord run_one(gateway::Gateway& gw, const AuditItem& item, const gateway::ModelSpec& target,
                    const gateway::GenerationParams& params, classifier::Classifier& classifier) {
  auto r = base_record(item, target, params);
  std::string raw;
  try {
    raw = gw.complete(target, gateway::ChatPrompt{{}, item.text}, params).text;
  } catch (const gateway::GatewayError& e) {
    r.error = AuditError{std::string(gateway::to_string(e.kind())), e.what()};
    return r;
  }
  try {
    r.completion = parse_completion(raw, classifier.delimiters());
  } catch (const MalformedCompletionError& e) {
    r.error = AuditError{"malformed", e.what()};
    r.completion.reset();
    return r;
  }
  try {
    r.verdict = classifier.classify(item.text, *r.completion);
  } catch (const classifier::JudgeFormatError& e) {
    r.error = AuditError{"classification", e.what()};
  } catch (const classifier::ClassificationError& e) {
    r.error = AuditError{"classification", e.what()};
  } catch (const gateway::GatewayError& e) {
    r.error = AuditError{std::string(gateway::to_string(e.kind())), std::string("judge: ") + e.what()};
  }
  return r;
}

}  // namespace

std::vector<AuditRecord> audit(gateway::Gateway& gw, const std::vector<AuditItem>& items,
                               const gateway::ModelSpec& target, classifier::Classifier& classifier,
                               const AuditOptions& opts) {
  const auto params = opts.params.value_or(target.default_params);
  std::vector<AuditRecord> out(items.size());
  std::vector<uint8_t> done(items.size(), 0);

  std::unique_ptr<JsonlAppender> journal;
  if (opts.journal) {
    std::map<std::string, AuditRecord> prior;
    if (std::filesystem::exists(*opts.journal)) {
      for (auto& r : read_audit_journal(*opts.journal).records) {
        if (r.ok()) prior.insert_or_assign(r.key(), std::move(r));
      }
    }
    for (size_t i = 0; i < items.size(); ++i) {
      auto key = base_record(items[i], target, params).key();
      if (auto it = prior.find(key); it != prior.end()) {
        out[i] = it->second;
        done[i] = 1;
      }
    }
    if (opts.journal->has_parent_path()) std::filesystem::create_directories(opts.journal->parent_path());
    journal = std::make_unique<JsonlAppender>(*opts.journal);
  }

  std::vector<size_t> todo;
  for (size_t i = 0; i < items.size(); ++i) {
    if (!done[i]) todo.push_back(i);
  }
  if (items.size() != todo.size()) {
    spdlog::info("audit: reusing {} journaled records, querying {}", items.size() - todo.size(), todo.size());
  }
  bounded_for_each(todo.size(), opts.concurrency, [&](size_t k) {
    const size_t i = todo[k];
    out[i] = run_one(gw, items[i], target, params, classifier);
    if (journal) journal->append(to_json(out[i]));
  });
  return out;
}

std::vector<AuditRecord> audit_dataset(gateway::Gateway& gw, const std::vector<curation::Prompt>& dataset,
                                       const gateway::ModelSpec& target, classifier::Classifier& classifier,
                                       const AuditOptions& opts) {
  std::vector<AuditItem> items;
  items.reserve(dataset.size());
  for (const auto& p : dataset) items.push_back(item_from_prompt(p));
  return audit(gw, items, target, classifier, opts);
}

SweepResult category_sensitivity(gateway::Gateway& gw, const curation::CategorySet& categories,
                                 size_t n_per_category, const gateway::ModelSpec& generator,
                                 const gateway::ModelSpec& target, classifier::Classifier& classifier,
                                 const AuditOptions& opts) {
  if (n_per_category == 0) throw std::invalid_argument("n_per_category must be >= 1");
  categories.validate();
  const auto& entries = categories.entries;
  std::vector<curation::GenerationResult> generated(entries.size());
  bounded_for_each(entries.size(), opts.concurrency, [&](size_t i) {
    try {
      generated[i] = curation::generate_questions(gw, entries[i].name, n_per_category, generator, entries[i].name);
    } catch (const gateway::GatewayError& e) {
      generated[i].warnings.push_back("generation failed for '" + entries[i].name + "': " + e.what());
    }
  });

  SweepResult result;
  std::vector<AuditItem> items;
  for (auto& g : generated) {
    for (const auto& p : g.prompts) items.push_back(item_from_prompt(p));
    for (auto& w : g.warnings) result.warnings.push_back(std::move(w));
  }
  result.records = audit(gw, items, target, classifier, opts);
  result.table = tabulate(result.records, Grouping::category);
  return result;
}

bool is_identity_language(std::string_view language) {
  auto l = text::fold(text::trim(language));
  return l == "en" || l == "english" || l == "identity" || l == "none";
}

gateway::ChatPrompt translation_prompt(std::string_view language, std::string_view t) {
  return {assets::fill(assets::prompt("translation.system"), {{"language", std::string(language)}}),
          std::string(t)};
}

bool looks_like_commentary(std::string_view reply) {
  auto t = text::trim(reply);
  if (t.empty()) return true;
  static const char* kOpeners[] = {"here is",  "here's",  "sure",        "certainly", "of course",
                                   "translation:", "the translation", "below is", "i have translated",
                                   "as an ai"};
  for (const char* o : kOpeners) {
    if (text::starts_with_icase(t, o)) return true;
  }
  return false;
}

MultilingualResult multilingual_audit(gateway::Gateway& gw, const std::vector<curation::Prompt>& dataset,
                                      const std::vector<std::string>& languages,
                                      const gateway::ModelSpec& translator, const gateway::ModelSpec& target,
                                      classifier::Classifier& classifier, const AuditOptions& opts) {
  if (translator.role != gateway::Role::translator) {
    throw gateway::ConfigurationError("model '" + translator.id + "' is not a translator");
  }
  auto tparams = translator.default_params;
  tparams.temperature = 0.0;

  MultilingualResult result;
  std::vector<AuditItem> items;
  for (const auto& lang : languages) {
    if (is_identity_language(lang)) {
      for (const auto& p : dataset) {
        auto it = item_from_prompt(p);
        it.language = lang;
        items.push_back(std::move(it));
      }
      continue;
    }
    std::vector<gateway::ChatPrompt> asks;
    asks.reserve(dataset.size());
    for (const auto& p : dataset) asks.push_back(translation_prompt(lang, p.text));
    auto outcomes = curation::ask_with_reask(
        gw, translator, asks, tparams, [](std::string_view r) { return !looks_like_commentary(r); },
        "Output only the translated text, with no commentary.",
        curation::JudgeCallOptions{opts.concurrency, 2});
    for (size_t i = 0; i < dataset.size(); ++i) {
      if (!outcomes[i].reply) {
        auto p = dataset[i];
        p.language = lang;
        result.needs_review.push_back({std::move(p), "translation: " + outcomes[i].failure});
        continue;
      }
      auto it = item_from_prompt(dataset[i]);
      it.text = std::string(text::trim(*outcomes[i].reply));
      it.language = lang;
      items.push_back(std::move(it));
    }
  }
  result.records = audit(gw, items, target, classifier, opts);
  result.table = tabulate(result.records, Grouping::language);
  return result;
}

std::string task_instruction(TaskMode task) {
  switch (task) {
    case TaskMode::summarize: return assets::prompt("task_summarize");
    case TaskMode::translate: return assets::prompt("task_translate");
    case TaskMode::qa: break;
  }
  throw std::invalid_argument("qa is not a wrapping task");
}

std::string wrap_task(TaskMode task, std::string_view document) {
  return task_instruction(task) + "\n\n" + std::string(document);
}

SweepResult task_wrapped_audit(gateway::Gateway& gw, const std::vector<std::string>& documents, TaskMode task,
                               const gateway::ModelSpec& target, classifier::Classifier& classifier,
                               const AuditOptions& opts) {
  SweepResult result;
  result.table.grouping = Grouping::task;
  if (documents.empty()) return result;
  std::vector<AuditItem> items;
  items.reserve(documents.size());
  for (const auto& d : documents) {
    AuditItem it;
    it.prompt_id = curation::prompt_id(d);
    it.text = wrap_task(task, d);
    it.task_mode = task;
    items.push_back(std::move(it));
  }
  result.records = audit(gw, items, target, classifier, opts);
  result.table = tabulate(result.records, Grouping::task);
  return result;
}

}  // namespace censaudit::audit
