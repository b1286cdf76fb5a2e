#pragma once

#include "censaudit/classifier/classifier.hpp"
#include "censaudit/curation/prompt.hpp"
#include "censaudit/curation/stages.hpp"
#include "censaudit/gateway/gateway.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace censaudit::audit {

using json = nlohmann::json;

enum class TaskMode { qa, summarize, translate };

std::string_view to_string(TaskMode t);
TaskMode task_mode_from_string(std::string_view s);

// kind: transport | api | script | configuration | malformed | classification
struct AuditError {
  std::string kind;
  std::string message;
};

struct AuditRecord {
  std::string prompt_id;
  std::string model_id;
  gateway::GenerationParams params;
  std::string prompt_sent;
  std::string language = "en";
  TaskMode task_mode = TaskMode::qa;
  std::optional<std::string> category;
  std::optional<std::string> source;
  std::optional<Completion> completion;
  std::optional<classifier::CensorshipVerdict> verdict;
  std::optional<AuditError> error;

  bool ok() const { return completion && verdict && !error; }
  // Identity of the audited slot: prompt, model, language variant, task.
  std::string key() const;
};

json to_json(const AuditRecord& r);
AuditRecord audit_record_from_json(const json& j);

struct JournalRead {
  std::vector<AuditRecord> records;
  size_t total_lines = 0;
  size_t skipped_lines = 0;
};

// Reads "audit" lines; other kinds and corrupt lines are skipped and counted.
JournalRead read_audit_journal(const std::filesystem::path& path);

enum class Grouping { category, language, source, model, task };

std::string_view to_string(Grouping g);
Grouping grouping_from_string(std::string_view s);

struct RateRow {
  std::string key;
  size_t censored_count = 0;
  size_t total = 0;
  double rate = 0.0;
  size_t type1 = 0;
  size_t type2 = 0;
  size_t type3 = 0;
  size_t errors = 0;  // error records, not part of total
};

struct RateTable {
  Grouping grouping = Grouping::category;
  std::vector<RateRow> rows;  // sorted by key

  const RateRow* find(std::string_view key) const;
  size_t total() const;
  size_t censored() const;
};

// Only successful records count; grouping keys missing on a record become "(none)".
RateTable tabulate(const std::vector<AuditRecord>& records, Grouping grouping);
std::string to_csv(const RateTable& t);
json to_json(const RateTable& t);
RateTable rate_table_from_json(const json& j);

struct AuditItem {
  std::string prompt_id;
  std::string text;
  std::string language = "en";
  TaskMode task_mode = TaskMode::qa;
  std::optional<std::string> category;
  std::optional<std::string> source;
};

AuditItem item_from_prompt(const curation::Prompt& p);

struct AuditOptions {
  std::optional<gateway::GenerationParams> params;  // default: target.default_params
  size_t concurrency = 8;
  // When set, records are appended as produced and successful ones found in an
  // existing journal are reused instead of re-queried.
  std::optional<std::filesystem::path> journal;
};

// One record per item, in item order. Failures become error records.
std::vector<AuditRecord> audit(gateway::Gateway& gw, const std::vector<AuditItem>& items,
                               const gateway::ModelSpec& target, classifier::Classifier& classifier,
                               const AuditOptions& opts = {});

std::vector<AuditRecord> audit_dataset(gateway::Gateway& gw, const std::vector<curation::Prompt>& dataset,
                                       const gateway::ModelSpec& target, classifier::Classifier& classifier,
                                       const AuditOptions& opts = {});

struct SweepResult {
  RateTable table;
  std::vector<AuditRecord> records;
  std::vector<std::string> warnings;
};

SweepResult category_sensitivity(gateway::Gateway& gw, const curation::CategorySet& categories,
                                 size_t n_per_category, const gateway::ModelSpec& generator,
                                 const gateway::ModelSpec& target, classifier::Classifier& classifier,
                                 const AuditOptions& opts = {});

// Languages treated as a no-op translation.
bool is_identity_language(std::string_view language);

gateway::ChatPrompt translation_prompt(std::string_view language, std::string_view text);

// Replies that open with meta commentary ("Here is the translation", "Sure", ...)
// rather than the translation itself.
bool looks_like_commentary(std::string_view reply);

struct MultilingualResult {
  RateTable table;
  std::vector<AuditRecord> records;
  std::vector<curation::ReviewItem> needs_review;
};

MultilingualResult multilingual_audit(gateway::Gateway& gw, const std::vector<curation::Prompt>& dataset,
                                      const std::vector<std::string>& languages,
                                      const gateway::ModelSpec& translator, const gateway::ModelSpec& target,
                                      classifier::Classifier& classifier, const AuditOptions& opts = {});

std::string task_instruction(TaskMode task);
std::string wrap_task(TaskMode task, std::string_view document);

SweepResult task_wrapped_audit(gateway::Gateway& gw, const std::vector<std::string>& documents, TaskMode task,
                               const gateway::ModelSpec& target, classifier::Classifier& classifier,
                               const AuditOptions& opts = {});

}  // namespace censaudit::audit
