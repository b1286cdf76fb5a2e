#pragma once

#include "censaudit/classifier/classifier.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace censaudit::curation {

using json = nlohmann::json;

enum class Source { reddit, twitter, llm };

std::string_view to_string(Source s);
Source source_from_string(std::string_view s);

// 16 hex chars of sha256 over the whitespace-normalized text.
std::string prompt_id(std::string_view text);

struct Prompt {
  std::string id;
  std::string text;
  Source source = Source::llm;
  std::optional<std::string> language;
  std::optional<std::string> category;
  std::string created_from;
  std::optional<classifier::CensorshipVerdict> verdict;
  json meta = json::object();

  static Prompt make(std::string text, Source source, std::string created_from = {});
};

json to_json(const Prompt& p);
Prompt prompt_from_json(const json& j);

struct IngestResult {
  std::vector<Prompt> prompts;
  size_t total_lines = 0;
  size_t skipped_lines = 0;
};

// Input corpus: one {text, source, meta?, category?, language?} object per line.
// Lines that are not objects or lack text/source are counted as skipped.
IngestResult ingest_corpus(const std::filesystem::path& path);

std::vector<Prompt> read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, const std::vector<Prompt>& prompts);

enum class CategoryKind { individual, incident, other };

std::string_view to_string(CategoryKind k);

struct CategoryEntry {
  std::string name;
  CategoryKind kind = CategoryKind::other;
  std::optional<std::string> parent;
};

struct CategorySet {
  std::vector<CategoryEntry> entries;

  // Throws std::invalid_argument when empty or names repeat.
  void validate() const;
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;

  static CategorySet from_json(const json& j);
  static CategorySet load(const std::filesystem::path& path);
  static CategorySet defaults();
};

struct StageReport {
  std::string stage_name;
  size_t in_count = 0;
  size_t out_count = 0;
  std::vector<std::string> removed_ids;
  std::vector<std::string> needs_review_ids;  // subset of removed_ids unless the stage retains them

  bool arithmetic_holds() const { return in_count >= removed_ids.size() && out_count == in_count - removed_ids.size(); }
};

json to_json(const StageReport& r);
StageReport report_from_json(const json& j);

struct ReviewItem {
  Prompt prompt;
  std::string reason;
};

struct StageResult {
  std::vector<Prompt> prompts;
  StageReport report;
  std::vector<ReviewItem> needs_review;
};

// Builds the report for a filtering stage from its input and retained output.
StageReport make_report(std::string stage_name, const std::vector<Prompt>& in,
                        const std::vector<Prompt>& out);

}  // namespace censaudit::curation
