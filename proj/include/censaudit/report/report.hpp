#pragma once

#include "censaudit/audit/audit.hpp"
#include "censaudit/curation/prompt.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace censaudit::report {

using json = nlohmann::json;

struct SourceStats {
  std::string source;
  size_t count = 0;
  double proportion = 0.0;  // percent of the dataset
  double mean_tokens = 0.0;
  double sd_tokens = 0.0;   // population standard deviation
  size_t type1 = 0;
  size_t type2 = 0;
  double type1_share = 0.0;  // percent of Type1+Type2 verdicts in this source
  double type2_share = 0.0;
};

struct DatasetStatistics {
  std::vector<SourceStats> rows;  // one per present source, then "all"
};

DatasetStatistics dataset_statistics(const std::vector<curation::Prompt>& dataset);
std::string to_csv(const DatasetStatistics& s);

struct FigureData {
  std::string name;
  std::string csv;
};

struct DistributionOptions {
  audit::Grouping grouping = audit::Grouping::category;
  // Restricts category rows to one kind using the category set.
  std::optional<curation::CategoryKind> kind;
  std::optional<curation::CategorySet> categories;
};

FigureData distribution_export(const std::vector<audit::AuditRecord>& records, const DistributionOptions& opts);

struct InputFile {
  std::string path;  // relative to the journal root
  std::string sha256;
  size_t total_lines = 0;
  size_t parsed_lines = 0;
  size_t corrupt_lines = 0;
  size_t unrecognized_lines = 0;
};

struct Table {
  std::string name;
  std::string csv;
};

struct Report {
  std::string title;
  std::string generated_at;
  std::vector<InputFile> inputs;
  std::vector<Table> tables;
  std::vector<FigureData> figures;
  std::string summary_text;
};

struct ReportConfig {
  std::string title = "Censorship audit report";
  std::string generated_at = "unspecified";
  std::optional<curation::CategorySet> categories;
};

// Reads every *.jsonl under `journal_root` (skipping cache/, stages/,
// needs_review/ and report/ subdirectories) in sorted path order.
Report build_report(const std::filesystem::path& journal_root, const ReportConfig& cfg);

// Writes <output_dir>/report/{summary.txt,report.json,tables/*.csv,figures/*.csv}.
// Returns the written paths.
std::vector<std::filesystem::path> write_report(const Report& r, const std::filesystem::path& output_dir);

inline std::vector<std::filesystem::path> render_report(const std::filesystem::path& journal_root,
                                                        const ReportConfig& cfg,
                                                        const std::filesystem::path& output_dir) {
  return write_report(build_report(journal_root, cfg), output_dir);
}

}  // namespace censaudit::report
