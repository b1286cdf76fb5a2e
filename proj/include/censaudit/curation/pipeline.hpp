#pragma once

#include "censaudit/curation/stages.hpp"
#include "censaudit/gateway/config.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace censaudit::curation {

class ResumeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Canonical stage order.
const std::vector<std::string>& default_stage_order();

struct PipelineConfig {
  std::optional<std::filesystem::path> corpus;
  std::filesystem::path output_dir = "out";
  std::vector<std::string> stages = default_stage_order();

  LengthBounds length;
  std::vector<std::string> keywords;  // empty = shipped keyword asset
  double dedup_threshold = 0.9;
  CategorySet categories = CategorySet::defaults();
  bool recategorize = false;

  // LLM-generated prompts skip the social-media filters and join the flow
  // right before the first of categorize/global/local.
  bool generate_llm = false;
  GenerationQuotas quotas;
  std::string generator_id;

  std::string judge_id;
  std::vector<std::string> reference_ids;
  std::string target_id;
  classifier::Mode classifier_mode = classifier::Mode::heuristic;

  JudgeCallOptions calls;
  size_t concurrency = 8;
  std::optional<std::string> from_stage;

  // Reads the "curation" section of a run configuration.
  static PipelineConfig from_run_config(const gateway::RunConfig& cfg);
};

struct PipelineResult {
  std::vector<Prompt> dataset;
  std::vector<StageReport> reports;
  std::vector<std::string> warnings;
  std::filesystem::path dataset_path;
  std::vector<std::filesystem::path> written;
};

// Output layout under output_dir:
//   stages/00_input.jsonl, stages/00_llm.jsonl, stages/NN_<stage>.jsonl
//   reports/NN_<stage>.json, needs_review/<stage>.jsonl, dataset.jsonl
PipelineResult run_pipeline(gateway::Gateway& gw, const gateway::RunConfig& run, const PipelineConfig& cfg);

}  // namespace censaudit::curation
