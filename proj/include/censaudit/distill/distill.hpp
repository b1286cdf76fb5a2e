#pragma once

#include "censaudit/curation/stages.hpp"
#include "censaudit/gateway/gateway.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace censaudit::distill {

using json = nlohmann::json;

enum class Origin { base, injected };
enum class Strategy { random, diverse, refusal };

std::string_view to_string(Origin o);
std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class TaxonomyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class SplitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kRefusalAnswer =
    "I'm sorry, I cannot answer that question. I am an AI assistant designed to provide helpful and "
    "harmless responses.";

// Empty reasoning block followed by the fixed refusal.
std::string refusal_response();

struct TrainingSample {
  std::string prompt;
  std::string response;
  Origin origin = Origin::base;
  std::optional<std::string> strategy_tag;
  std::optional<std::string> source_prompt_id;
  json extra = json::object();  // unrecognized fields of base records, re-emitted verbatim
};

json to_json(const TrainingSample& s);
TrainingSample training_sample_from_json(const json& j);

std::vector<TrainingSample> read_corpus(const std::filesystem::path& path);
void write_corpus(const std::filesystem::path& path, const std::vector<TrainingSample>& corpus);

// A censored prompt together with the target's censored completion.
struct PoolItem {
  std::string id;
  std::string prompt;
  std::string response;
  std::optional<std::string> category;
};

// Accepts audit journals (censored records only) or {id?, prompt|text, response, category?} lines.
std::vector<PoolItem> read_pool(const std::filesystem::path& path);

struct InjectionPlan {
  Strategy strategy = Strategy::random;
  size_t n = 0;
  uint64_t seed = 0;
  std::vector<std::string> selected_ids;
  std::vector<std::string> warnings;
};

json to_json(const InjectionPlan& p);
InjectionPlan injection_plan_from_json(const json& j);

TrainingSample refusal_rewrite(TrainingSample sample);

struct Cluster {
  std::string name;
  std::string description;
  std::vector<size_t> example_indices;  // 1-based positions in the prompt list sent to the judge
  std::vector<std::string> member_ids;
};

struct Taxonomy {
  std::vector<Cluster> clusters;
};

json to_json(const Taxonomy& t);

// Parses the taxonomy judge reply; nullopt unless exactly k named clusters.
std::optional<std::vector<Cluster>> parse_taxonomy(std::string_view reply, size_t k);

struct JudgeContext {
  gateway::Gateway* gw = nullptr;
  const gateway::ModelSpec* judge = nullptr;
  curation::JudgeCallOptions calls;
};

// Pool is processed in id order. Throws TaxonomyError when the taxonomy or an
// assignment never conforms.
Taxonomy cluster_topics(const std::vector<PoolItem>& pool, const JudgeContext& ctx, size_t k = 10);

struct DiverseSelection {
  std::vector<std::string> ids;
  std::vector<std::string> warnings;
};

DiverseSelection select_diverse(const Taxonomy& taxonomy, const std::vector<PoolItem>& pool,
                                const JudgeContext& ctx, uint64_t seed);

struct InjectResult {
  std::vector<TrainingSample> corpus;
  InjectionPlan plan;
  std::optional<Taxonomy> taxonomy;
};

// base + n selected pool samples. Diverse needs a judge context.
InjectResult inject(const std::vector<TrainingSample>& base, const std::vector<PoolItem>& pool,
                    InjectionPlan plan, const std::optional<JudgeContext>& judge = std::nullopt);

struct SplitRequest {
  std::string topic;
  size_t n_same_topic = 200;
  size_t n_other_categories = 10;
  size_t per_category = 20;
  uint64_t seed = 0;
  std::vector<std::string> exclude_ids;  // injected ids
  std::optional<std::string> ood_reference;
};

struct EvalSplits {
  std::vector<PoolItem> same_topic;
  std::vector<PoolItem> other_categories;
  std::optional<std::string> ood_reference;
};

EvalSplits make_eval_splits(const std::vector<PoolItem>& pool, const SplitRequest& req);

}  // namespace censaudit::distill
