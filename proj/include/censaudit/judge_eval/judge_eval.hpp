#pragma once

#include "censaudit/classifier/classifier.hpp"
#include "censaudit/curation/prompt.hpp"
#include "censaudit/gateway/gateway.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace censaudit::judge_eval {

using json = nlohmann::json;

enum class Winner { A, B };
enum class Dimension { factuality, alignment };
enum class Order { AB, BA };

std::string_view to_string(Winner w);
std::string_view to_string(Dimension d);
std::string_view to_string(Order o);
Dimension dimension_from_string(std::string_view s);

struct JudgeVerdict {
  std::string prompt_id;
  Winner winner = Winner::A;
  Dimension dimension = Dimension::factuality;
  std::string justification;
  Order presented_order = Order::AB;
};

json to_json(const JudgeVerdict& v);
JudgeVerdict judge_verdict_from_json(const json& j);

// Order is a pure function of (seed, question, answers).
Order presentation_order(uint64_t seed, std::string_view question, std::string_view a, std::string_view b);

// Parses {"choice": 1|2, "justification": "..."} with a non-empty justification.
std::optional<std::pair<int, std::string>> parse_choice(std::string_view reply);

gateway::ChatPrompt factuality_prompt(std::string_view question, std::string_view first, std::string_view second);
gateway::ChatPrompt alignment_prompt(std::string_view question, std::string_view first, std::string_view second,
                                     std::string_view reference);

struct CompareOptions {
  uint64_t seed = 0;
  int max_asks = 2;
};

// Throw classifier::JudgeFormatError when the judge never conforms.
JudgeVerdict compare_factuality(gateway::Gateway& gw, std::string_view question, std::string_view answer_a,
                                std::string_view answer_b, const gateway::ModelSpec& judge,
                                const CompareOptions& opts = {});
JudgeVerdict compare_alignment(gateway::Gateway& gw, std::string_view question, std::string_view answer_a,
                               std::string_view answer_b, std::string_view reference_answer,
                               const gateway::ModelSpec& judge, const CompareOptions& opts = {});

struct DimensionSummary {
  Dimension dimension = Dimension::factuality;
  size_t total = 0;
  size_t wins_a = 0;
  size_t wins_b = 0;
  double pct_a = 0.0;
  double pct_b = 0.0;
  size_t presented_ab = 0;
  size_t presented_ba = 0;
  size_t a_wins_when_ab = 0;
  size_t a_wins_when_ba = 0;
  size_t first_presented_wins = 0;
  double first_presented_rate = 0.0;
  // |2 * first_presented_rate - 1|: 0 = no positional preference, 1 = always first (or always second).
  double positional_skew = 0.0;
  bool bias_flagged = false;
};

struct JudgeSummary {
  std::vector<DimensionSummary> rows;  // only dimensions present in the input
};

inline constexpr double kPositionalSkewFlag = 0.25;

JudgeSummary aggregate(const std::vector<JudgeVerdict>& verdicts);
json to_json(const JudgeSummary& s);
std::string to_csv(const JudgeSummary& s);

struct Answer {
  std::string question;
  std::string answer;
  std::optional<std::string> source;
};

// prompt_id -> final answer, from audit or jailbreak journals (successful records only).
std::map<std::string, Answer> load_answers(const std::filesystem::path& journal);

// Up to `per_source` ids per source, sampled with `seed`, returned sorted.
std::vector<std::string> sample_per_source(const std::map<std::string, Answer>& answers, size_t per_source,
                                           uint64_t seed);

struct ComparisonRun {
  std::vector<JudgeVerdict> verdicts;
  std::vector<std::pair<std::string, std::string>> failures;  // prompt_id, message
};

// Compares ids present in both (and in `reference` for alignment). Per-comparison
// seeds derive from opts.seed and the prompt id.
ComparisonRun compare_answers(gateway::Gateway& gw, const std::map<std::string, Answer>& a,
                              const std::map<std::string, Answer>& b,
                              const std::map<std::string, Answer>* reference, Dimension dimension,
                              const gateway::ModelSpec& judge, const std::vector<std::string>& ids,
                              const CompareOptions& opts = {}, size_t concurrency = 8);

}  // namespace censaudit::judge_eval
