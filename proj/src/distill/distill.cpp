#include "censaudit/distill/distill.hpp"

#include "censaudit/assets.hpp"
#include "censaudit/audit/audit.hpp"
#include "censaudit/jsonl.hpp"
#include "censaudit/rng.hpp"
#include "censaudit/text.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>
#include <set>

namespace censaudit::distill {

std::string_view to_string(Origin o) { return o == Origin::base ? "base" : "injected"; }

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::random: return "random";
    case Strategy::diverse: return "diverse";
    case Strategy::refusal: return "refusal";
  }
  return "random";
}

Strategy strategy_from_string(std::string_view s) {
  if (s == "random") return Strategy::random;
  if (s == "diverse") return Strategy::diverse;
  if (s == "refusal") return Strategy::refusal;
  throw std::invalid_argument("unknown injection strategy: " + std::string(s));
}

std::string refusal_response() { return "<think>\n\n</think>\n\n" + std::string(kRefusalAnswer); }

json to_json(const TrainingSample& s) {
  json j = s.extra.is_object() ? s.extra : json::object();
  j["prompt"] = s.prompt;
  j["response"] = s.response;
  if (s.origin == Origin::injected) {
    j["origin"] = "injected";
    if (s.strategy_tag) j["strategy_tag"] = *s.strategy_tag;
    if (s.source_prompt_id) j["source_prompt_id"] = *s.source_prompt_id;
  }
  return j;
}

TrainingSample training_sample_from_json(const json& j) {
  TrainingSample s;
  s.prompt = j.at("prompt").get<std::string>();
  s.response = j.at("response").get<std::string>();
  s.origin = j.value("origin", "base") == "injected" ? Origin::injected : Origin::base;
  if (j.contains("strategy_tag") && j.at("strategy_tag").is_string()) s.strategy_tag = j.at("strategy_tag").get<std::string>();
  if (j.contains("source_prompt_id") && j.at("source_prompt_id").is_string()) {
    s.source_prompt_id = j.at("source_prompt_id").get<std::string>();
  }
  if (s.origin == Origin::base) {
    s.extra = j;
    for (const char* k : {"prompt", "response", "origin"}) s.extra.erase(k);
  }
  return s;
}

std::vector<TrainingSample> read_corpus(const std::filesystem::path& path) {
  auto raw = read_jsonl(path);
  if (raw.skipped_lines) {
    throw PlanError("corpus " + path.string() + " has " + std::to_string(raw.skipped_lines) + " malformed lines");
  }
  std::vector<TrainingSample> out;
  out.reserve(raw.records.size());
  for (const auto& j : raw.records) {
    try {
      out.push_back(training_sample_from_json(j));
    } catch (const json::exception& e) {
      throw PlanError("corpus " + path.string() + " record lacks prompt/response: " + e.what());
    }
  }
  return out;
}

void write_corpus(const std::filesystem::path& path, const std::vector<TrainingSample>& corpus) {
  std::vector<json> lines;
  lines.reserve(corpus.size());
  for (const auto& s : corpus) lines.push_back(to_json(s));
  write_jsonl(path, lines);
}

std::vector<PoolItem> read_pool(const std::filesystem::path& path) {
  std::vector<PoolItem> out;
  for (const auto& j : read_jsonl(path).records) {
    if (j.value("kind", "") == "audit") {
      auto r = audit::audit_record_from_json(j);
      if (!r.ok() || !r.verdict->censored()) continue;
      out.push_back({r.prompt_id, r.prompt_sent, r.completion->raw, r.category});
      continue;
    }
    PoolItem p;
    p.prompt = j.contains("prompt") ? j.at("prompt").get<std::string>() : j.at("text").get<std::string>();
    p.id = j.contains("id") ? j.at("id").get<std::string>() : curation::prompt_id(p.prompt);
    p.response = j.value("response", "");
    if (j.contains("category") && j.at("category").is_string()) p.category = j.at("category").get<std::string>();
    out.push_back(std::move(p));
  }
  return out;
}

json to_json(const InjectionPlan& p) {
  return {{"strategy", to_string(p.strategy)},
          {"n", p.n},
          {"seed", p.seed},
          {"selected_ids", p.selected_ids},
          {"warnings", p.warnings}};
}

InjectionPlan injection_plan_from_json(const json& j) {
  InjectionPlan p;
  p.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  p.n = j.at("n").get<size_t>();
  p.seed = j.value("seed", uint64_t{0});
  p.selected_ids = j.value("selected_ids", std::vector<std::string>{});
  p.warnings = j.value("warnings", std::vector<std::string>{});
  return p;
}

TrainingSample refusal_rewrite(TrainingSample sample) {
  sample.response = refusal_response();
  sample.origin = Origin::injected;
  sample.strategy_tag = "refusal";
  sample.extra = json::object();
  return sample;
}

json to_json(const Taxonomy& t) {
  json arr = json::array();
  for (const auto& c : t.clusters) {
    arr.push_back({{"name", c.name},
                   {"description", c.description},
                   {"examples", c.example_indices},
                   {"members", c.member_ids}});
  }
  return {{"clusters", arr}};
}

namespace {

std::vector<PoolItem> sorted_pool(const std::vector<PoolItem>& pool) {
  std::map<std::string, PoolItem> by_id;
  for (const auto& p : pool) by_id.emplace(p.id, p);
  std::vector<PoolItem> out;
  out.reserve(by_id.size());
  for (auto& [id, p] : by_id) out.push_back(std::move(p));
  return out;
}

std::optional<Cluster> cluster_from(const json& c, const std::string& fallback_name) {
  if (!c.is_object()) return std::nullopt;
  Cluster out;
  out.name = c.contains("name") && c.at("name").is_string() ? c.at("name").get<std::string>() : fallback_name;
  if (text::trim(out.name).empty()) return std::nullopt;
  if (c.contains("description") && c.at("description").is_string()) out.description = c.at("description").get<std::string>();
  for (const char* key : {"examples", "example_indices"}) {
    if (!c.contains(key) || !c.at(key).is_array()) continue;
    for (const auto& e : c.at(key)) {
      if (e.is_number_unsigned()) out.example_indices.push_back(e.get<size_t>());
      else if (e.is_number_integer() && e.get<int64_t>() > 0) out.example_indices.push_back(static_cast<size_t>(e.get<int64_t>()));
    }
  }
  return out;
}

}  // namespace

std::optional<std::vector<Cluster>> parse_taxonomy(std::string_view reply, size_t k) {
  auto j = extract_json(reply);
  if (!j) return std::nullopt;
  const json* list = nullptr;
  if (j->is_array()) {
    list = &*j;
  } else if (j->is_object()) {
    for (auto it = j->begin(); it != j->end(); ++it) {
      if (it.value().is_array()) {
        list = &it.value();
        break;
      }
    }
  }
  std::vector<Cluster> out;
  if (list) {
    for (const auto& c : *list) {
      auto cl = cluster_from(c, "");
      if (!cl) return std::nullopt;
      out.push_back(std::move(*cl));
    }
  } else if (j->is_object()) {
    for (auto it = j->begin(); it != j->end(); ++it) {
      auto cl = cluster_from(it.value(), it.key());
      if (!cl) return std::nullopt;
      out.push_back(std::move(*cl));
    }
  }
  if (out.size() != k) return std::nullopt;
  std::set<std::string> names;
  for (const auto& c : out) {
    if (!names.insert(text::fold(c.name)).second) return std::nullopt;
  }
  return out;
}

Taxonomy cluster_topics(const std::vector<PoolItem>& pool_in, const JudgeContext& ctx, size_t k) {
  if (k == 0) throw std::invalid_argument("cluster count must be >= 1");
  if (!ctx.gw || !ctx.judge) throw PlanError("topic clustering needs a judge model");
  const auto pool = sorted_pool(pool_in);
  auto params = ctx.judge->default_params;
  params.temperature = 0.0;

  std::string seeds;
  for (size_t i = 0; i < pool.size(); ++i) seeds += std::to_string(i + 1) + ". " + pool[i].prompt + "\n";
  if (!seeds.empty()) seeds.pop_back();
  gateway::ChatPrompt ask{assets::prompt("taxonomy_generation.system"),
                          assets::fill(assets::prompt("taxonomy_generation.user"),
                                       {{"k", std::to_string(k)}, {"seed_prompts", seeds}})};
  auto reply = curation::ask_with_reask(
      *ctx.gw, *ctx.judge, {ask}, params, [k](std::string_view r) { return parse_taxonomy(r, k).has_value(); },
      "Reply with only a JSON object containing exactly " + std::to_string(k) + " categories.", ctx.calls);
  if (!reply[0].reply) throw TaxonomyError("taxonomy generation failed: " + reply[0].failure);

  Taxonomy t;
  t.clusters = *parse_taxonomy(*reply[0].reply, k);
  for (auto& c : t.clusters) {
    c.example_indices.erase(std::remove_if(c.example_indices.begin(), c.example_indices.end(),
                                           [&](size_t i) { return i == 0 || i > pool.size(); }),
                            c.example_indices.end());
  }
  if (k == 1) {
    for (const auto& p : pool) t.clusters[0].member_ids.push_back(p.id);
    return t;
  }

  std::vector<std::string> names;
  std::string listing;
  for (const auto& c : t.clusters) {
    names.push_back(c.name);
    listing += "- " + c.name + ": " + c.description + "\n";
  }
  if (!listing.empty()) listing.pop_back();
  std::vector<gateway::ChatPrompt> asks;
  for (const auto& p : pool) {
    asks.push_back({assets::fill(assets::prompt("cluster_assignment.system"), {{"categories", listing}}),
                    assets::fill(assets::prompt("cluster_assignment.user"),
                                 {{"categories", listing}, {"question", p.prompt}})});
  }
  auto outcomes = curation::ask_with_reask(
      *ctx.gw, *ctx.judge, asks, params,
      [&](std::string_view r) { return curation::match_category(r, names).has_value(); },
      "Reply with exactly one category name from the list.", ctx.calls);
  for (size_t i = 0; i < pool.size(); ++i) {
    if (!outcomes[i].reply) throw TaxonomyError("cluster assignment failed for " + pool[i].id + ": " + outcomes[i].failure);
    auto name = *curation::match_category(*outcomes[i].reply, names);
    for (auto& c : t.clusters) {
      if (c.name == name) c.member_ids.push_back(pool[i].id);
    }
  }
  return t;
}

DiverseSelection select_diverse(const Taxonomy& taxonomy, const std::vector<PoolItem>& pool_in,
                                const JudgeContext& ctx, uint64_t seed) {
  if (!ctx.gw || !ctx.judge) throw PlanError("diverse selection needs a judge model");
  std::map<std::string, const PoolItem*> by_id;
  for (const auto& p : pool_in) by_id.emplace(p.id, &p);
  for (const auto& c : taxonomy.clusters) {
    if (c.member_ids.empty()) throw std::invalid_argument("cluster '" + c.name + "' has no members");
  }

  std::vector<std::string> ids;
  std::vector<gateway::ChatPrompt> asks;
  for (const auto& c : taxonomy.clusters) {
    for (const auto& id : c.member_ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) throw std::invalid_argument("cluster member " + id + " is not in the pool");
      ids.push_back(id);
      asks.push_back({assets::prompt("clarity_check.system"), "Question: " + it->second->prompt});
    }
  }
  auto params = ctx.judge->default_params;
  params.temperature = 0.0;
  auto outcomes = curation::ask_with_reask(
      *ctx.gw, *ctx.judge, asks, params,
      [](std::string_view r) { return curation::parse_yes_no(r).has_value(); },
      "Answer with only \"yes\" or \"no\".", ctx.calls);
  std::set<std::string> clear;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (outcomes[i].reply && *curation::parse_yes_no(*outcomes[i].reply)) clear.insert(ids[i]);
  }

  DiverseSelection out;
  SeededRng rng(seed);
  for (const auto& c : taxonomy.clusters) {
    std::vector<std::string> candidates;
    for (const auto& id : c.member_ids) {
      if (clear.count(id)) candidates.push_back(id);
    }
    if (candidates.empty()) {
      out.warnings.push_back("cluster '" + c.name + "' has no clearly worded prompt; choosing any member");
      spdlog::warn(out.warnings.back());
      candidates = c.member_ids;
    }
    std::sort(candidates.begin(), candidates.end());
    out.ids.push_back(candidates[rng.below(candidates.size())]);
  }
  return out;
}

InjectResult inject(const std::vector<TrainingSample>& base, const std::vector<PoolItem>& pool_in,
                    InjectionPlan plan, const std::optional<JudgeContext>& judge) {
  const auto pool = sorted_pool(pool_in);
  if (plan.n > pool.size()) {
    throw PlanError("requested " + std::to_string(plan.n) + " injected samples but the pool has " +
                    std::to_string(pool.size()));
  }
  InjectResult result;
  plan.selected_ids.clear();
  SeededRng rng(plan.seed);

  if (plan.n > 0 && plan.strategy == Strategy::diverse) {
    if (!judge) throw PlanError("diverse strategy needs a judge model");
    auto taxonomy = cluster_topics(pool, *judge, plan.n);
    Taxonomy populated;
    for (const auto& c : taxonomy.clusters) {
      if (!c.member_ids.empty()) populated.clusters.push_back(c);
    }
    auto sel = select_diverse(populated, pool, *judge, splitmix64(plan.seed));
    plan.selected_ids = sel.ids;
    plan.warnings = sel.warnings;
    if (plan.selected_ids.size() < plan.n) {
      plan.warnings.push_back(std::to_string(taxonomy.clusters.size() - populated.clusters.size()) +
                              " empty clusters; topping up with random pool samples");
      std::set<std::string> taken(plan.selected_ids.begin(), plan.selected_ids.end());
      std::vector<std::string> rest;
      for (const auto& p : pool) {
        if (!taken.count(p.id)) rest.push_back(p.id);
      }
      rng.shuffle(rest);
      for (size_t i = 0; plan.selected_ids.size() < plan.n; ++i) plan.selected_ids.push_back(rest[i]);
    }
    result.taxonomy = std::move(taxonomy);
  } else if (plan.n > 0) {
    std::vector<size_t> order(pool.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    for (size_t i = 0; i < plan.n; ++i) plan.selected_ids.push_back(pool[order[i]].id);
  }

  std::map<std::string, const PoolItem*> by_id;
  for (const auto& p : pool) by_id.emplace(p.id, &p);
  result.corpus = base;
  for (const auto& id : plan.selected_ids) {
    const auto& item = *by_id.at(id);
    TrainingSample s;
    s.prompt = item.prompt;
    s.response = item.response;
    s.origin = Origin::injected;
    s.strategy_tag = std::string(to_string(plan.strategy));
    s.source_prompt_id = item.id;
    if (plan.strategy == Strategy::refusal) s = refusal_rewrite(std::move(s));
    result.corpus.push_back(std::move(s));
  }
  result.plan = std::move(plan);
  return result;
}

EvalSplits make_eval_splits(const std::vector<PoolItem>& pool_in, const SplitRequest& req) {
  const auto pool = sorted_pool(pool_in);
  const std::set<std::string> excluded(req.exclude_ids.begin(), req.exclude_ids.end());
  std::vector<PoolItem> same;
  std::map<std::string, std::vector<PoolItem>> others;
  for (const auto& p : pool) {
    if (excluded.count(p.id) || !p.category) continue;
    if (*p.category == req.topic) same.push_back(p);
    else others[*p.category].push_back(p);
  }
  if (same.size() < req.n_same_topic) {
    throw SplitError("topic '" + req.topic + "' has " + std::to_string(same.size()) + " eligible prompts, " +
                     std::to_string(req.n_same_topic) + " requested");
  }
  std::vector<std::string> eligible;
  for (const auto& [name, items] : others) {
    if (items.size() >= req.per_category) eligible.push_back(name);
  }
  if (eligible.size() < req.n_other_categories) {
    throw SplitError(std::to_string(eligible.size()) + " other categories have at least " +
                     std::to_string(req.per_category) + " prompts, " + std::to_string(req.n_other_categories) +
                     " requested");
  }

  SeededRng rng(req.seed);
  EvalSplits out;
  rng.shuffle(same);
  same.resize(req.n_same_topic);
  std::sort(same.begin(), same.end(), [](const PoolItem& a, const PoolItem& b) { return a.id < b.id; });
  out.same_topic = std::move(same);

  rng.shuffle(eligible);
  eligible.resize(req.n_other_categories);
  std::sort(eligible.begin(), eligible.end());
  for (const auto& name : eligible) {
    auto items = others[name];
    rng.shuffle(items);
    items.resize(req.per_category);
    std::sort(items.begin(), items.end(), [](const PoolItem& a, const PoolItem& b) { return a.id < b.id; });
    for (auto& p : items) out.other_categories.push_back(std::move(p));
  }
  out.ood_reference = req.ood_reference;
  return out;
}

}  // namespace censaudit::distill
