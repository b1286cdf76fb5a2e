#include "censaudit/assets.hpp"
#include "censaudit/curation/stages.hpp"
#include "censaudit/parallel.hpp"
#include "censaudit/text.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <cctype>

namespace censaudit::curation {

namespace {

std::string_view strip_marker(std::string_view line) {
  line = text::trim(line);
  size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')' || line[i] == ':')) {
    line.remove_prefix(i + 1);
  } else if (!line.empty() && (line[0] == '-' || line[0] == '*')) {
    line.remove_prefix(1);
  } else if (line.substr(0, 3) == "\xE2\x80\xA2") {
    line.remove_prefix(3);
  }
  return text::trim(line);
}

const json& templates() {
  static const json t = json::parse(assets::get("question_templates.json"));
  return t;
}

std::vector<std::string> fixed_questions(const CategoryEntry& e, size_t limit) {
  std::vector<std::string> out;
  const char* key = e.kind == CategoryKind::individual ? "individual" : "incident";
  for (const auto& t : templates().at(key)) {
    if (out.size() == limit) break;
    out.push_back(assets::fill(t.get<std::string>(), {{"name", e.name}}));
  }
  return out;
}

Prompt llm_prompt(std::string question, const std::string& category, std::string created_from) {
  auto p = Prompt::make(std::move(question), Source::llm, std::move(created_from));
  p.category = category;
  p.language = "en";
  return p;
}

}  // namespace

std::vector<std::string> parse_question_list(std::string_view reply) {
  std::vector<std::string> out;
  for (const auto& line : text::split_lines(reply)) {
    auto q = strip_marker(line);
    if (!q.empty()) out.emplace_back(q);
  }
  return out;
}

gateway::ChatPrompt question_generation_prompt(std::string_view topic, size_t count) {
  const std::map<std::string, std::string> values{{"count", std::to_string(count)},
                                                  {"topic", std::string(topic)}};
  return {assets::prompt("question_generation.system"),
          assets::fill(assets::prompt("question_generation.user"), values)};
}

GenerationResult generate_questions(gateway::Gateway& gw, std::string_view topic, size_t count,
                                    const gateway::ModelSpec& generator, const std::string& category) {
  GenerationResult r;
  if (count == 0) return r;
  auto prompt = question_generation_prompt(topic, count);
  std::vector<std::string> questions;
  for (int ask = 0; ask < 2; ++ask) {
    if (ask == 1) {
      prompt.user += "\n\nReturn exactly " + std::to_string(count) + " questions, one per line.";
    }
    questions = parse_question_list(gw.complete(generator, prompt, generator.default_params).text);
    if (questions.size() == count) break;
  }
  if (questions.size() != count) {
    r.warnings.push_back("generator returned " + std::to_string(questions.size()) + " of " +
                         std::to_string(count) + " questions for '" + std::string(topic) + "'");
    spdlog::warn(r.warnings.back());
    if (questions.size() > count) questions.resize(count);
  }
  for (auto& q : questions) r.prompts.push_back(llm_prompt(std::move(q), category, "generated:" + generator.id));
  return r;
}

GenerationResult generate_llm_prompts(gateway::Gateway& gw, const CategorySet& topics,
                                      const gateway::ModelSpec& generator, const GenerationQuotas& quotas,
                                      size_t concurrency) {
  const auto& entries = topics.entries;
  std::vector<GenerationResult> parts(entries.size());
  bounded_for_each(entries.size(), concurrency, [&](size_t i) {
    const auto& e = entries[i];
    size_t fixed = 0;
    size_t generated = quotas.other_generated;
    if (e.kind == CategoryKind::individual) {
      fixed = quotas.individual_templates;
      generated = quotas.individual_generated;
    } else if (e.kind == CategoryKind::incident) {
      fixed = quotas.incident_templates;
      generated = quotas.incident_generated;
    }
    for (auto& q : fixed_questions(e, fixed)) parts[i].prompts.push_back(llm_prompt(std::move(q), e.name, "template"));
    auto more = generate_questions(gw, e.name, generated, generator, e.name);
    for (auto& p : more.prompts) parts[i].prompts.push_back(std::move(p));
    parts[i].warnings = std::move(more.warnings);
  });
  GenerationResult r;
  for (auto& part : parts) {
    for (auto& p : part.prompts) r.prompts.push_back(std::move(p));
    for (auto& w : part.warnings) r.warnings.push_back(std::move(w));
  }
  return r;
}

}  // namespace censaudit::curation
