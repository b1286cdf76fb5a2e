#include "censaudit/curation/pipeline.hpp"

#include "censaudit/assets.hpp"
#include "censaudit/jsonl.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <memory>
#include <set>

namespace censaudit::curation {

namespace fs = std::filesystem;

const std::vector<std::string>& default_stage_order() {
  static const std::vector<std::string> kOrder{"length",  "keywords", "china_related", "english_language",
                                               "is_question", "is_clear", "dedup", "links",
                                               "categorize", "global", "local"};
  return kOrder;
}

namespace {

const std::set<std::string> kKnownStages{"length",   "keywords", "china_related", "english_language",
                                         "is_question", "is_clear", "dedup", "links",
                                         "categorize", "global", "local"};

std::string canonical_stage(const std::string& s) {
  if (kKnownStages.count(s)) return s;
  try {
    return std::string(to_string(criterion_from_string(s)));
  } catch (const std::invalid_argument&) {
    throw gateway::ConfigurationError("unknown curation stage: " + s);
  }
}

bool is_llm_merge_point(const std::string& stage) {
  return stage == "categorize" || stage == "global" || stage == "local";
}

std::string stage_file(size_t idx, const std::string& name) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%02zu_", idx);
  return buf + name;
}

std::vector<std::string> shipped_keywords() {
  auto j = json::parse(assets::get("keywords.json"));
  return j.at("keywords").get<std::vector<std::string>>();
}

std::vector<std::string> read_keywords(const gateway::RunConfig& run, const json& v) {
  if (v.is_array()) return v.get<std::vector<std::string>>();
  std::ifstream in(run.resolve(v.get<std::string>()));
  if (!in) throw gateway::ConfigurationError("keyword file not found: " + v.get<std::string>());
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw gateway::ConfigurationError("keyword file is not JSON: " + v.get<std::string>());
  return j.is_array() ? j.get<std::vector<std::string>>() : j.at("keywords").get<std::vector<std::string>>();
}

std::optional<size_t> optional_bound(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<size_t>();
}

std::vector<json> review_lines(const std::vector<ReviewItem>& items) {
  std::vector<json> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back({{"prompt", to_json(it.prompt)}, {"reason", it.reason}});
  return out;
}

}  // namespace

PipelineConfig PipelineConfig::from_run_config(const gateway::RunConfig& run) {
  PipelineConfig c;
  c.output_dir = run.output_dir;
  c.concurrency = run.concurrency;
  const json s = run.section("curation");
  if (s.contains("corpus")) c.corpus = run.resolve(s.at("corpus").get<std::string>());
  if (s.contains("stages")) c.stages = s.at("stages").get<std::vector<std::string>>();
  if (s.contains("length")) {
    const auto& l = s.at("length");
    c.length.min_tokens = l.value("min", c.length.min_tokens);
    for (auto src : {Source::twitter, Source::reddit, Source::llm}) {
      auto key = std::string(to_string(src));
      if (l.contains(key)) c.length.max_tokens_by_source[src] = optional_bound(l.at(key));
    }
  }
  if (s.contains("keywords")) c.keywords = read_keywords(run, s.at("keywords"));
  c.dedup_threshold = s.value("dedup_threshold", c.dedup_threshold);
  if (s.contains("categories")) c.categories = CategorySet::load(run.resolve(s.at("categories").get<std::string>()));
  c.recategorize = s.value("recategorize", false);
  if (s.contains("generate")) {
    const auto& g = s.at("generate");
    c.generate_llm = g.value("enabled", true);
    c.generator_id = g.value("generator", std::string());
    if (g.contains("quotas")) {
      const auto& q = g.at("quotas");
      c.quotas.individual_templates = q.value("individual_templates", c.quotas.individual_templates);
      c.quotas.individual_generated = q.value("individual_generated", c.quotas.individual_generated);
      c.quotas.incident_templates = q.value("incident_templates", c.quotas.incident_templates);
      c.quotas.incident_generated = q.value("incident_generated", c.quotas.incident_generated);
      c.quotas.other_generated = q.value("other_generated", c.quotas.other_generated);
    }
  }
  c.judge_id = s.value("judge", std::string());
  c.target_id = s.value("target", std::string());
  if (s.contains("reference_pool")) c.reference_ids = s.at("reference_pool").get<std::vector<std::string>>();
  c.classifier_mode = classifier::mode_from_string(s.value("classifier", std::string("heuristic")));
  c.calls.max_asks = s.value("max_asks", c.calls.max_asks);
  c.calls.concurrency = c.concurrency;
  return c;
}

PipelineResult run_pipeline(gateway::Gateway& gw, const gateway::RunConfig& run, const PipelineConfig& cfg) {
  std::vector<std::string> stages;
  for (const auto& s : cfg.stages) stages.push_back(canonical_stage(s));

  const fs::path out = cfg.output_dir;
  const fs::path stage_dir = out / "stages";
  const fs::path report_dir = out / "reports";
  const fs::path review_dir = out / "needs_review";
  fs::create_directories(stage_dir);
  fs::create_directories(report_dir);

  PipelineResult result;
  size_t start = 0;
  if (cfg.from_stage) {
    const auto wanted = canonical_stage(*cfg.from_stage);
    auto it = std::find(stages.begin(), stages.end(), wanted);
    if (it == stages.end()) throw ResumeError("stage '" + wanted + "' is not in the configured stage list");
    start = static_cast<size_t>(it - stages.begin());
  }

  size_t merge_at = stages.size();
  for (size_t i = 0; i < stages.size(); ++i) {
    if (is_llm_merge_point(stages[i])) {
      merge_at = i;
      break;
    }
  }

  std::vector<Prompt> current;
  std::vector<Prompt> llm;
  const fs::path input_file = stage_dir / "00_input.jsonl";
  const fs::path llm_file = stage_dir / "00_llm.jsonl";

  if (start == 0) {
    if (cfg.corpus) {
      auto ingest = ingest_corpus(*cfg.corpus);
      if (ingest.skipped_lines) {
        result.warnings.push_back("skipped " + std::to_string(ingest.skipped_lines) + " corpus lines");
        spdlog::warn(result.warnings.back());
      }
      for (auto& p : ingest.prompts) {
        (p.source == Source::llm ? llm : current).push_back(std::move(p));
      }
    }
    if (cfg.generate_llm) {
      const auto& gen = run.require_role(gateway::Role::generator, cfg.generator_id);
      auto g = generate_llm_prompts(gw, cfg.categories, gen, cfg.quotas, cfg.concurrency);
      for (auto& p : g.prompts) llm.push_back(std::move(p));
      for (auto& w : g.warnings) result.warnings.push_back(std::move(w));
    }
    write_dataset(input_file, current);
    write_dataset(llm_file, llm);
    result.written.push_back(input_file);
    result.written.push_back(llm_file);
  } else {
    const fs::path prev = stage_dir / (stage_file(start, stages[start - 1]) + ".jsonl");
    if (!fs::exists(prev)) throw ResumeError("missing intermediate for resume: " + prev.string());
    current = read_dataset(prev);
    if (start <= merge_at) {
      if (!fs::exists(llm_file)) throw ResumeError("missing intermediate for resume: " + llm_file.string());
      llm = read_dataset(llm_file);
    }
    for (size_t i = 0; i < start; ++i) {
      auto rp = report_dir / (stage_file(i + 1, stages[i]) + ".json");
      std::ifstream in(rp);
      if (!in) continue;
      auto j = json::parse(in, nullptr, false);
      if (!j.is_discarded()) result.reports.push_back(report_from_json(j));
    }
  }

  std::unique_ptr<classifier::Classifier> clf;
  auto get_classifier = [&]() -> classifier::Classifier& {
    if (!clf) {
      if (cfg.classifier_mode == classifier::Mode::judge) {
        clf = std::make_unique<classifier::JudgeClassifier>(gw, run.require_role(gateway::Role::judge, cfg.judge_id));
      } else {
        clf = std::make_unique<classifier::HeuristicClassifier>();
      }
    }
    return *clf;
  };
  auto judge = [&]() -> const gateway::ModelSpec& { return run.require_role(gateway::Role::judge, cfg.judge_id); };

  for (size_t i = start; i < stages.size(); ++i) {
    const auto& name = stages[i];
    if (i == merge_at && !llm.empty()) {
      std::set<std::string> seen;
      for (const auto& p : current) seen.insert(p.id);
      for (auto& p : llm) {
        if (seen.insert(p.id).second) current.push_back(std::move(p));
      }
      llm.clear();
    }
    StageResult r;
    spdlog::info("curation stage {} ({}): {} prompts in", i + 1, name, current.size());
    if (name == "length") {
      r = filter_length(current, cfg.length);
    } else if (name == "keywords") {
      r = filter_keywords(current, cfg.keywords.empty() ? shipped_keywords() : cfg.keywords);
    } else if (name == "dedup") {
      r = dedup(current, cfg.dedup_threshold);
    } else if (name == "links") {
      r = strip_links(current);
    } else if (name == "categorize") {
      r = categorize(gw, current, cfg.categories, judge(), CategorizeOptions{cfg.calls, cfg.recategorize});
    } else if (name == "global") {
      std::vector<gateway::ModelSpec> pool;
      if (cfg.reference_ids.empty()) {
        pool = run.with_role(gateway::Role::reference);
      } else {
        for (const auto& id : cfg.reference_ids) pool.push_back(run.model(id));
      }
      r = check_global_censorship(gw, current, pool, get_classifier(), cfg.concurrency);
    } else if (name == "local") {
      r = check_local_censorship(gw, current, run.require_role(gateway::Role::target, cfg.target_id),
                                 get_classifier(), cfg.concurrency);
    } else {
      r = judged_filter(gw, current, criterion_from_string(name), judge(), cfg.calls);
    }

    const auto base = stage_file(i + 1, name);
    const auto stage_path = stage_dir / (base + ".jsonl");
    const auto report_path = report_dir / (base + ".json");
    write_dataset(stage_path, r.prompts);
    {
      std::ofstream rep(report_path, std::ios::binary | std::ios::trunc);
      rep << to_json(r.report).dump(2) << "\n";
    }
    result.written.push_back(stage_path);
    result.written.push_back(report_path);
    const auto review_path = review_dir / (name + ".jsonl");
    if (!r.needs_review.empty()) {
      fs::create_directories(review_dir);
      write_jsonl(review_path, review_lines(r.needs_review));
      result.written.push_back(review_path);
    } else if (fs::exists(review_path)) {
      fs::remove(review_path);
    }
    result.reports.push_back(r.report);
    current = std::move(r.prompts);
  }
  if (merge_at == stages.size()) {
    for (auto& p : llm) current.push_back(std::move(p));
  }

  result.dataset_path = out / "dataset.jsonl";
  write_dataset(result.dataset_path, current);
  result.written.push_back(result.dataset_path);
  result.dataset = std::move(current);
  return result;
}

}  // namespace censaudit::curation
