#pragma once

#include "censaudit/classifier/classifier.hpp"
#include "censaudit/curation/prompt.hpp"
#include "censaudit/gateway/gateway.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace censaudit::curation {

// ---- deterministic filters ------------------------------------------------

struct LengthBounds {
  size_t min_tokens = 5;
  // nullopt = no upper bound for that source.
  std::map<Source, std::optional<size_t>> max_tokens_by_source{
      {Source::twitter, 90}, {Source::reddit, 300}, {Source::llm, std::nullopt}};
};

// Token = whitespace-delimited unit; bounds are inclusive.
StageResult filter_length(const std::vector<Prompt>& prompts, const LengthBounds& bounds = {});

// Keeps prompts containing at least one keyword (case-insensitive, word boundaries).
// Throws std::invalid_argument for an empty keyword list.
StageResult filter_keywords(const std::vector<Prompt>& prompts, const std::vector<std::string>& keywords);

// Removes URL spans in place; prompts left empty are dropped. Ids never change.
StageResult strip_links(const std::vector<Prompt>& prompts);
std::string remove_urls(std::string_view text);

// Exact duplicates by id, then near-duplicates by token 3-shingle Jaccard >= threshold.
// The earliest prompt of each group survives.
StageResult dedup(const std::vector<Prompt>& prompts, double threshold = 0.9);

// ---- judge-backed stages --------------------------------------------------

enum class Criterion { china_related, english_language, is_question, is_clear };

std::string_view to_string(Criterion c);
Criterion criterion_from_string(std::string_view s);

struct JudgeCallOptions {
  size_t concurrency = 8;
  int max_asks = 2;  // first ask plus one re-ask
};

// "yes"/"no" (also true/false) at the start of the reply, case-insensitive.
std::optional<bool> parse_yes_no(std::string_view reply);

gateway::ChatPrompt criterion_prompt(Criterion c, std::string_view text);

// Each prompt is retained iff the judge answers yes. Replies that never conform,
// and transport failures, route the prompt to needs_review (and out of the stage).
StageResult judged_filter(gateway::Gateway& gw, const std::vector<Prompt>& prompts, Criterion criterion,
                          const gateway::ModelSpec& judge, const JudgeCallOptions& opts = {});

struct CategorizeOptions {
  JudgeCallOptions calls;
  bool recategorize = false;
};

// Assigns one category name from the closed list. Prompts whose replies never
// match a name stay in the output uncategorized and are listed in needs_review.
StageResult categorize(gateway::Gateway& gw, const std::vector<Prompt>& prompts,
                       const CategorySet& categories, const gateway::ModelSpec& judge,
                       const CategorizeOptions& opts = {});

// Maps a free-text reply onto a category name (exact, case-insensitive, after
// stripping quotes, list markers and trailing punctuation).
std::optional<std::string> match_category(std::string_view reply, const std::vector<std::string>& names);

// ---- LLM prompt generation -------------------------------------------------

struct GenerationQuotas {
  size_t individual_templates = 5;
  size_t individual_generated = 5;
  size_t incident_templates = 9;
  size_t incident_generated = 5;
  size_t other_generated = 20;
};

struct GenerationResult {
  std::vector<Prompt> prompts;
  std::vector<std::string> warnings;
};

// Splits a newline-separated question list, dropping blank lines and stray
// bullets or numbering.
std::vector<std::string> parse_question_list(std::string_view reply);

gateway::ChatPrompt question_generation_prompt(std::string_view topic, size_t count);

// Fixed templates for individuals and incidents, then generator questions via
// the question-generation prompt. Wrong counts are re-asked once, then accepted
// partially with a warning.
GenerationResult generate_llm_prompts(gateway::Gateway& gw, const CategorySet& topics,
                                      const gateway::ModelSpec& generator,
                                      const GenerationQuotas& quotas = {}, size_t concurrency = 8);

// Asks the generator for exactly `count` questions about `topic`.
GenerationResult generate_questions(gateway::Gateway& gw, std::string_view topic, size_t count,
                                    const gateway::ModelSpec& generator, const std::string& category);

// ---- censorship checks ---------------------------------------------------

// Removes a prompt iff ANY reference-pool model's response is classified as censored.
StageResult check_global_censorship(gateway::Gateway& gw, const std::vector<Prompt>& prompts,
                                    const std::vector<gateway::ModelSpec>& reference_pool,
                                    classifier::Classifier& classifier, size_t concurrency = 8);

// Retains a prompt iff the target's response is Type1 or Type2; the verdict is stored.
StageResult check_local_censorship(gateway::Gateway& gw, const std::vector<Prompt>& prompts,
                                   const gateway::ModelSpec& target, classifier::Classifier& classifier,
                                   size_t concurrency = 8);

// ---- shared helper --------------------------------------------------------

struct AskOutcome {
  std::optional<std::string> reply;  // first conforming reply
  std::string failure;               // set when reply is empty
};

// Sends each prompt, re-asking non-conforming slots (with `reminder` appended to
// the user message) up to opts.max_asks total asks. Batched through the gateway.
std::vector<AskOutcome> ask_with_reask(gateway::Gateway& gw, const gateway::ModelSpec& model,
                                       const std::vector<gateway::ChatPrompt>& prompts,
                                       const gateway::GenerationParams& params,
                                       const std::function<bool(std::string_view)>& conforms,
                                       const std::string& reminder, const JudgeCallOptions& opts);

}  // namespace censaudit::curation
