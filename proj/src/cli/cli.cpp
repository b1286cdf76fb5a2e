#include "censaudit/cli/cli.hpp"

#include "censaudit/audit/audit.hpp"
#include "censaudit/curation/pipeline.hpp"
#include "censaudit/distill/distill.hpp"
#include "censaudit/gateway/config.hpp"
#include "censaudit/hashing.hpp"
#include "censaudit/jailbreak/jailbreak.hpp"
#include "censaudit/jsonl.hpp"
#include "censaudit/judge_eval/judge_eval.hpp"
#include "censaudit/report/report.hpp"
#include "censaudit/version.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>

namespace censaudit::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> argv)
      : command_(std::move(command)), argv_(std::move(argv)), started_(utc_now()) {}

  void set_config(const gateway::RunConfig& cfg) {
    config_path_ = cfg.path.string();
    config_hash_ = cfg.hash;
    seed_ = cfg.seed;
  }
  void set_seed(uint64_t s) { seed_ = s; }
  void input(const fs::path& p) {
    if (fs::is_regular_file(p)) inputs_[p.string()] = sha256_file(p);
  }
  void output(const fs::path& p) { outputs_.push_back(p.string()); }
  void outputs(const std::vector<fs::path>& ps) {
    for (const auto& p : ps) output(p);
  }
  void note(const std::string& key, json value) { extra_[key] = std::move(value); }

  fs::path write(const fs::path& out_dir, int exit_code, const std::string& error) const {
    const fs::path dir = out_dir / "manifests";
    fs::create_directories(dir);
    std::string stamp = started_;
    for (char& c : stamp) {
      if (c == ':') c = '-';
    }
    fs::path path = dir / (command_ + "-" + stamp + ".json");
    for (int i = 2; fs::exists(path); ++i) path = dir / (command_ + "-" + stamp + "-" + std::to_string(i) + ".json");
    json j{{"command", command_},
           {"argv", argv_},
           {"config_path", config_path_},
           {"config_hash", config_hash_},
           {"root_seed", seed_},
           {"inputs", inputs_},
           {"outputs", outputs_},
           {"started_at", started_},
           {"finished_at", utc_now()},
           {"tool_version", kVersion},
           {"exit_code", exit_code}};
    if (!error.empty()) j["error"] = error;
    for (auto it = extra_.begin(); it != extra_.end(); ++it) j[it.key()] = it.value();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << j.dump(2) << "\n";
    return path;
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  std::string started_;
  std::string config_path_;
  std::string config_hash_;
  uint64_t seed_ = 0;
  std::map<std::string, std::string> inputs_;
  std::vector<std::string> outputs_;
  json extra_ = json::object();
};

struct Common {
  std::string config;
  std::string out;
};

struct Run {
  gateway::RunConfig cfg;
  std::unique_ptr<gateway::Gateway> gw;
  fs::path out;
};

Run load_run(const Common& c, Manifest& m) {
  Run r;
  r.cfg = gateway::RunConfig::load(c.config);
  if (!c.out.empty()) {
    r.cfg.output_dir = c.out;
    if (!r.cfg.document.contains("cache_dir")) r.cfg.cache_dir = r.cfg.output_dir / "cache";
  }
  r.out = r.cfg.output_dir;
  fs::create_directories(r.out);
  m.set_config(r.cfg);
  for (const auto& model : r.cfg.models) {
    if (model.is_mock()) continue;
    if (model.auth_ref.empty()) {
      throw gateway::ConfigurationError("model '" + model.id + "' is live but has no auth_ref naming a credential env var");
    }
    const char* v = std::getenv(model.auth_ref.c_str());
    if (v == nullptr || *v == '\0') {
      throw gateway::ConfigurationError("missing credential: set environment variable " + model.auth_ref +
                                        " for model '" + model.id + "'");
    }
  }
  r.gw = gateway::make_gateway(r.cfg);
  return r;
}

std::string pick(const std::string& flag, const json& section, const char* key, const std::string& fallback = {}) {
  if (!flag.empty()) return flag;
  if (section.contains(key) && section.at(key).is_string()) return section.at(key).get<std::string>();
  return fallback;
}

fs::path input_path(const Run& r, const std::string& flag, const json& section, const char* key,
                    const fs::path& fallback) {
  if (!flag.empty()) return flag;
  if (section.contains(key) && section.at(key).is_string()) return r.cfg.resolve(section.at(key).get<std::string>());
  return fallback;
}

std::unique_ptr<classifier::Classifier> make_classifier(Run& r, const std::string& mode_flag,
                                                        const std::string& default_mode, std::string judge_flag = {}) {
  const json s = r.cfg.section("classifier");
  const auto mode = classifier::mode_from_string(pick(mode_flag, s, "mode", default_mode));
  classifier::Lexicons lex = s.contains("lexicon") ? classifier::Lexicons::load(r.cfg.resolve(s.at("lexicon").get<std::string>()))
                                                   : classifier::Lexicons::defaults();
  const size_t min_chars = s.value("min_reasoning_chars", kDefaultMinReasoningChars);
  if (mode == classifier::Mode::judge) {
    classifier::JudgeOptions jo;
    jo.max_asks = s.value("max_asks", jo.max_asks);
    jo.min_reasoning_chars = min_chars;
    const auto& judge = r.cfg.require_role(gateway::Role::judge, pick(judge_flag, s, "judge"));
    return std::make_unique<classifier::JudgeClassifier>(*r.gw, judge, std::move(lex), jo);
  }
  classifier::HeuristicOptions ho;
  ho.min_reasoning_chars = min_chars;
  return std::make_unique<classifier::HeuristicClassifier>(std::move(lex), ho);
}

void write_text(const fs::path& p, const std::string& content, Manifest& m) {
  fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
  m.output(p);
}

void write_table(const fs::path& stem, const audit::RateTable& t, Manifest& m) {
  write_text(fs::path(stem.string() + ".csv"), audit::to_csv(t), m);
  write_text(fs::path(stem.string() + ".json"), audit::to_json(t).dump(2) + "\n", m);
}

std::vector<curation::Prompt> load_dataset(const fs::path& p, Manifest& m) {
  if (!fs::exists(p)) throw std::runtime_error("dataset file not found: " + p.string());
  m.input(p);
  return curation::read_dataset(p);
}

// ---------------------------------------------------------------- commands

struct CurateArgs {
  std::string from_stage;
  std::string corpus;
};

void cmd_curate(Run& r, const CurateArgs& a, Manifest& m) {
  auto pc = curation::PipelineConfig::from_run_config(r.cfg);
  pc.output_dir = r.out;
  if (!a.corpus.empty()) pc.corpus = a.corpus;
  if (!a.from_stage.empty()) pc.from_stage = a.from_stage;
  if (pc.corpus) {
    if (!fs::exists(*pc.corpus)) throw std::runtime_error("corpus file not found: " + pc.corpus->string());
    m.input(*pc.corpus);
  }
  auto res = curation::run_pipeline(*r.gw, r.cfg, pc);
  m.outputs(res.written);
  json reports = json::array();
  for (const auto& rep : res.reports) {
    spdlog::info("stage {:<18} in {:>6}  out {:>6}  removed {:>6}  needs review {:>4}", rep.stage_name, rep.in_count,
                 rep.out_count, rep.removed_ids.size(), rep.needs_review_ids.size());
    reports.push_back({{"stage", rep.stage_name}, {"in", rep.in_count}, {"out", rep.out_count}});
  }
  m.note("stages", reports);
  m.note("dataset_size", res.dataset.size());
}

struct AuditArgs {
  std::string dataset;
  std::string target;
  std::string classifier;
  std::string judge;
};

void cmd_audit(Run& r, const AuditArgs& a, Manifest& m) {
  const json s = r.cfg.section("audit");
  auto dataset = load_dataset(input_path(r, a.dataset, s, "dataset", r.out / "dataset.jsonl"), m);
  const auto& target = r.cfg.require_role(gateway::Role::target, pick(a.target, s, "target"));
  auto clf = make_classifier(r, a.classifier, "heuristic", a.judge);
  audit::AuditOptions opts;
  opts.concurrency = r.cfg.concurrency;
  if (s.contains("params")) opts.params = gateway::params_from_json(s.at("params"), target.default_params);
  opts.journal = r.out / "journals" / "audit.jsonl";
  auto records = audit::audit_dataset(*r.gw, dataset, target, *clf, opts);
  m.output(*opts.journal);
  for (auto g : {audit::Grouping::category, audit::Grouping::source, audit::Grouping::language, audit::Grouping::model}) {
    write_table(r.out / "tables" / ("audit_by_" + std::string(audit::to_string(g))), audit::tabulate(records, g), m);
  }
  auto all = audit::tabulate(records, audit::Grouping::model);
  spdlog::info("audit: {} censored of {} ({} error records)", all.censored(), all.total(),
               records.size() - all.total());
}

struct SweepArgs {
  std::string categories;
  std::string generator;
  std::string target;
  std::string classifier;
  size_t n = 0;
};

void cmd_sweep(Run& r, const SweepArgs& a, Manifest& m) {
  const json s = r.cfg.section("sweep");
  auto cat_path = input_path(r, a.categories, s, "categories", {});
  auto cats = cat_path.empty() ? curation::CategorySet::defaults() : curation::CategorySet::load(cat_path);
  if (!cat_path.empty()) m.input(cat_path);
  const size_t n = a.n ? a.n : s.value("n_per_category", size_t{30});
  const auto& gen = r.cfg.require_role(gateway::Role::generator, pick(a.generator, s, "generator"));
  const auto& target = r.cfg.require_role(gateway::Role::target, pick(a.target, s, "target"));
  auto clf = make_classifier(r, a.classifier, "heuristic");
  audit::AuditOptions opts;
  opts.concurrency = r.cfg.concurrency;
  opts.journal = r.out / "journals" / "sweep.jsonl";
  auto res = audit::category_sensitivity(*r.gw, cats, n, gen, target, *clf, opts);
  m.output(*opts.journal);
  write_table(r.out / "tables" / "sweep_by_category", res.table, m);
  size_t full = 0;
  for (const auto& row : res.table.rows) {
    if (row.total > 0 && row.censored_count == row.total) ++full;
  }
  spdlog::info("sweep: {} prompts over {} categories; {} categories fully censored", res.records.size(),
               res.table.rows.size(), full);
  m.note("warnings", res.warnings);
}

struct MultiArgs {
  std::string dataset;
  std::vector<std::string> languages;
  std::string translator;
  std::string target;
  std::string classifier;
};

void cmd_multilingual(Run& r, const MultiArgs& a, Manifest& m) {
  const json s = r.cfg.section("multilingual");
  auto dataset = load_dataset(input_path(r, a.dataset, s, "dataset", r.out / "dataset.jsonl"), m);
  auto languages = a.languages;
  if (languages.empty() && s.contains("languages")) languages = s.at("languages").get<std::vector<std::string>>();
  if (languages.empty()) throw std::invalid_argument("no languages given (use --languages or multilingual.languages)");
  const auto& translator = r.cfg.require_role(gateway::Role::translator, pick(a.translator, s, "translator"));
  const auto& target = r.cfg.require_role(gateway::Role::target, pick(a.target, s, "target"));
  auto clf = make_classifier(r, a.classifier, "judge");
  audit::AuditOptions opts;
  opts.concurrency = r.cfg.concurrency;
  opts.journal = r.out / "journals" / "multilingual.jsonl";
  auto res = audit::multilingual_audit(*r.gw, dataset, languages, translator, target, *clf, opts);
  m.output(*opts.journal);
  write_table(r.out / "tables" / "multilingual_by_language", res.table, m);
  const auto review = r.out / "needs_review" / "translation.jsonl";
  if (!res.needs_review.empty()) {
    std::vector<json> lines;
    for (const auto& it : res.needs_review) lines.push_back({{"prompt", curation::to_json(it.prompt)}, {"reason", it.reason}});
    fs::create_directories(review.parent_path());
    write_jsonl(review, lines);
    m.output(review);
  }
  for (const auto& row : res.table.rows) {
    spdlog::info("language {:<12} rate {:.2f}% ({} of {})", row.key, 100.0 * row.rate, row.censored_count, row.total);
  }
}

struct TaskArgs {
  std::string documents;
  std::string task = "summarize";
  std::string target;
  std::string classifier;
};

std::vector<std::string> read_documents(const fs::path& p) {
  auto raw = read_jsonl(p);
  if (raw.skipped_lines) {
    throw std::runtime_error("documents file has " + std::to_string(raw.skipped_lines) + " malformed lines: " + p.string());
  }
  std::vector<std::string> docs;
  for (const auto& j : raw.records) {
    if (j.contains("text")) docs.push_back(j.at("text").get<std::string>());
    else if (j.contains("document")) docs.push_back(j.at("document").get<std::string>());
    else throw std::runtime_error("document record lacks a text field in " + p.string());
  }
  return docs;
}

void cmd_task(Run& r, const TaskArgs& a, Manifest& m) {
  const json s = r.cfg.section("task_audit");
  const auto docs_path = input_path(r, a.documents, s, "documents", {});
  if (docs_path.empty()) throw std::invalid_argument("no documents file given (use --documents)");
  if (!fs::exists(docs_path)) throw std::runtime_error("documents file not found: " + docs_path.string());
  m.input(docs_path);
  const auto task = audit::task_mode_from_string(a.task);
  if (task == audit::TaskMode::qa) throw std::invalid_argument("--task must be summarize or translate");
  const auto& target = r.cfg.require_role(gateway::Role::target, pick(a.target, s, "target"));
  auto clf = make_classifier(r, a.classifier, "heuristic");
  audit::AuditOptions opts;
  opts.concurrency = r.cfg.concurrency;
  opts.journal = r.out / "journals" / ("task_" + a.task + ".jsonl");
  auto res = audit::task_wrapped_audit(*r.gw, read_documents(docs_path), task, target, *clf, opts);
  m.output(*opts.journal);
  write_table(r.out / "tables" / ("task_" + a.task), res.table, m);
  spdlog::info("{}: {} censored of {}", a.task, res.table.censored(), res.table.total());
}

struct JailbreakArgs {
  std::string dataset;
  std::string target;
  std::string classifier;
  std::string trigger;
  int k = 0;
};

void cmd_jailbreak(Run& r, const JailbreakArgs& a, Manifest& m) {
  const json s = r.cfg.section("jailbreak");
  auto dataset = load_dataset(input_path(r, a.dataset, s, "dataset", r.out / "dataset.jsonl"), m);
  auto jc = jailbreak::jailbreak_config_from_json(s);
  if (a.k) jc.max_iterations = a.k;
  if (!a.trigger.empty()) jc.trigger = a.trigger;
  jc.validate();
  m.note("jailbreak", jailbreak::to_json(jc));
  const auto& target = r.cfg.require_role(gateway::Role::target, pick(a.target, s, "target"));
  auto clf = make_classifier(r, a.classifier, "heuristic");
  jailbreak::CampaignOptions opts;
  opts.concurrency = r.cfg.concurrency;
  opts.journal = r.out / "journals" / "jailbreak.jsonl";
  auto res = jailbreak::bypass_campaign(*r.gw, dataset, target, jc, *clf, opts);
  m.output(*opts.journal);
  write_text(r.out / "jailbreak" / "summary.json", jailbreak::to_json(res.summary).dump(2) + "\n", m);
  write_text(r.out / "jailbreak" / "histogram.csv", jailbreak::histogram_csv(res.summary), m);
  spdlog::info("jailbreak: bypass rate {:.2f}% ({} of {}), residual Type2 {}, Type3 {}, errors {}",
               100.0 * res.summary.bypass_rate, res.summary.bypassed_uncensored, res.summary.total, res.summary.type2,
               res.summary.type3, res.summary.errors);
}

struct InjectArgs {
  std::string strategy;
  std::string base;
  std::string pool;
  std::string judge;
  long long n = -1;
  std::optional<uint64_t> seed;
};

void cmd_inject(Run& r, const InjectArgs& a, Manifest& m) {
  const json s = r.cfg.section("distill");
  const auto base_path = input_path(r, a.base, s, "base", {});
  const auto pool_path = input_path(r, a.pool, s, "pool", r.out / "journals" / "audit.jsonl");
  if (base_path.empty()) throw std::invalid_argument("inject needs --base (or distill.base)");
  for (const auto& p : {base_path, pool_path}) {
    if (!fs::exists(p)) throw std::runtime_error("file not found: " + p.string());
    m.input(p);
  }
  distill::InjectionPlan plan;
  plan.strategy = distill::strategy_from_string(pick(a.strategy, s, "strategy", "random"));
  const long long n = a.n >= 0 ? a.n : s.value("n", 0LL);
  if (n < 0) throw std::invalid_argument("--n must be >= 0");
  plan.n = static_cast<size_t>(n);
  plan.seed = a.seed.value_or(r.cfg.seed);
  m.set_seed(plan.seed);

  auto base = distill::read_corpus(base_path);
  auto full_pool = distill::read_pool(pool_path);
  auto pool = full_pool;
  if (s.contains("pool_category")) {
    const auto topic = s.at("pool_category").get<std::string>();
    pool.clear();
    for (const auto& p : full_pool) {
      if (p.category == topic) pool.push_back(p);
    }
  }
  std::optional<distill::JudgeContext> ctx;
  if (plan.strategy == distill::Strategy::diverse && plan.n > 0) {
    const auto& judge = r.cfg.require_role(gateway::Role::judge, pick(a.judge, s, "judge"));
    ctx = distill::JudgeContext{r.gw.get(), &judge, curation::JudgeCallOptions{r.cfg.concurrency, 2}};
  }
  auto res = distill::inject(base, pool, plan, ctx);

  const fs::path dir = r.out / "distill";
  fs::create_directories(dir);
  const std::string stem = "corpus_" + std::string(distill::to_string(plan.strategy)) + "_n" + std::to_string(plan.n) +
                           "_s" + std::to_string(plan.seed);
  distill::write_corpus(dir / (stem + ".jsonl"), res.corpus);
  m.output(dir / (stem + ".jsonl"));
  write_text(dir / (stem + ".plan.json"), distill::to_json(res.plan).dump(2) + "\n", m);
  if (res.taxonomy) write_text(dir / (stem + ".taxonomy.json"), distill::to_json(*res.taxonomy).dump(2) + "\n", m);

  if (s.contains("splits")) {
    const auto& sp = s.at("splits");
    distill::SplitRequest req;
    req.topic = sp.at("topic").get<std::string>();
    req.n_same_topic = sp.value("n_same_topic", req.n_same_topic);
    req.n_other_categories = sp.value("n_other_categories", req.n_other_categories);
    req.per_category = sp.value("per_category", req.per_category);
    req.seed = plan.seed;
    req.exclude_ids = res.plan.selected_ids;
    if (sp.contains("ood")) req.ood_reference = sp.at("ood").get<std::string>();
    auto splits = distill::make_eval_splits(full_pool, req);
    auto dump = [&](const std::string& name, const std::vector<distill::PoolItem>& items) {
      std::vector<json> lines;
      for (const auto& p : items) {
        lines.push_back({{"id", p.id}, {"prompt", p.prompt}, {"category", p.category ? json(*p.category) : json(nullptr)}});
      }
      const auto path = dir / "splits" / (stem + "." + name + ".jsonl");
      fs::create_directories(path.parent_path());
      write_jsonl(path, lines);
      m.output(path);
    };
    dump("same_topic", splits.same_topic);
    dump("other_categories", splits.other_categories);
    write_text(dir / "splits" / (stem + ".ood.json"),
               json{{"ood_reference", splits.ood_reference ? json(*splits.ood_reference) : json(nullptr)}}.dump(2) + "\n",
               m);
  }
  for (const auto& w : res.plan.warnings) spdlog::warn("inject: {}", w);
  spdlog::info("inject: {} base + {} injected ({})", base.size(), res.plan.selected_ids.size(),
               distill::to_string(plan.strategy));
}

struct CompareArgs {
  std::string a;
  std::string b;
  std::string reference;
  std::string dimension = "factuality";
  std::string judge;
  size_t per_source = 0;
  std::optional<uint64_t> seed;
};

void cmd_compare(Run& r, const CompareArgs& a, Manifest& m) {
  const json s = r.cfg.section("compare");
  const auto dim = judge_eval::dimension_from_string(a.dimension);
  if (dim == judge_eval::Dimension::alignment && a.reference.empty()) {
    throw std::invalid_argument("alignment comparison needs --reference");
  }
  for (const auto& p : {a.a, a.b, a.reference}) {
    if (p.empty()) continue;
    if (!fs::exists(p)) throw std::runtime_error("journal not found: " + p);
    m.input(p);
  }
  auto ans_a = judge_eval::load_answers(a.a);
  auto ans_b = judge_eval::load_answers(a.b);
  for (auto& [id, ans] : ans_a) {
    if (!ans.source) {
      if (auto it = ans_b.find(id); it != ans_b.end()) ans.source = it->second.source;
    }
  }
  std::optional<std::map<std::string, judge_eval::Answer>> ref;
  if (!a.reference.empty()) ref = judge_eval::load_answers(a.reference);
  const uint64_t seed = a.seed.value_or(r.cfg.seed);
  m.set_seed(seed);
  const size_t per_source = a.per_source ? a.per_source : s.value("per_source", size_t{0});
  std::vector<std::string> ids;
  if (per_source) {
    ids = judge_eval::sample_per_source(ans_a, per_source, seed);
  } else {
    for (const auto& [id, _] : ans_a) ids.push_back(id);
  }
  const auto& judge = r.cfg.require_role(gateway::Role::judge, pick(a.judge, s, "judge"));
  judge_eval::CompareOptions opts;
  opts.seed = seed;
  auto run = judge_eval::compare_answers(*r.gw, ans_a, ans_b, ref ? &*ref : nullptr, dim, judge, ids, opts,
                                         r.cfg.concurrency);
  const std::string name = "compare_" + a.dimension;
  std::vector<json> lines;
  for (const auto& v : run.verdicts) lines.push_back(judge_eval::to_json(v));
  const auto journal = r.out / "journals" / (name + ".jsonl");
  fs::create_directories(journal.parent_path());
  write_jsonl(journal, lines);
  m.output(journal);
  auto summary = judge_eval::aggregate(run.verdicts);
  write_text(r.out / "tables" / (name + ".csv"), judge_eval::to_csv(summary), m);
  write_text(r.out / "tables" / (name + ".json"), judge_eval::to_json(summary).dump(2) + "\n", m);
  if (!run.failures.empty()) {
    std::vector<json> fl;
    for (const auto& [id, msg] : run.failures) fl.push_back({{"prompt_id", id}, {"reason", msg}});
    const auto review = r.out / "needs_review" / (name + ".jsonl");
    fs::create_directories(review.parent_path());
    write_jsonl(review, fl);
    m.output(review);
  }
  for (const auto& row : summary.rows) {
    spdlog::info("{}: A {:.2f}% / B {:.2f}% over {} (positional skew {:.2f}{})", judge_eval::to_string(row.dimension),
                 row.pct_a, row.pct_b, row.total, row.positional_skew, row.bias_flagged ? ", flagged" : "");
  }
}

struct ReportArgs {
  std::string journals;
  std::string generated_at;
  std::string title;
};

void cmd_report(Run& r, const ReportArgs& a, Manifest& m) {
  const json s = r.cfg.section("report");
  report::ReportConfig rc;
  rc.title = pick(a.title, s, "title", rc.title);
  rc.generated_at = pick(a.generated_at, s, "generated_at", rc.generated_at);
  rc.categories = s.contains("categories") ? curation::CategorySet::load(r.cfg.resolve(s.at("categories").get<std::string>()))
                                           : curation::CategorySet::defaults();
  const fs::path root = a.journals.empty() ? r.out : fs::path(a.journals);
  auto rep = report::build_report(root, rc);
  for (const auto& in : rep.inputs) {
    m.input(fs::is_directory(root) ? root / in.path : root);
    if (in.corrupt_lines) spdlog::warn("report: {} corrupt lines skipped in {}", in.corrupt_lines, in.path);
  }
  m.outputs(report::write_report(rep, r.out));
  spdlog::info("report: {} inputs, {} tables, {} figures", rep.inputs.size(), rep.tables.size(), rep.figures.size());
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Local-censorship auditing toolkit for reasoning language models", "censaudit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")->capture_default_str();

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Run configuration file (JSON)")->required();
    sub->add_option("--out", common.out, "Override the configured output directory");
  };

  CurateArgs curate;
  auto* c_curate = app.add_subcommand("curate", "Run the curation pipeline");
  add_common(c_curate);
  c_curate->add_option("--from-stage", curate.from_stage, "Resume from this stage using cached intermediates");
  c_curate->add_option("--corpus", curate.corpus, "Input corpus (one JSON record per line)");

  AuditArgs aud;
  auto* c_audit = app.add_subcommand("audit", "Audit a dataset against a target model");
  add_common(c_audit);
  c_audit->add_option("--dataset", aud.dataset, "Dataset file (default <out>/dataset.jsonl)");
  c_audit->add_option("--target", aud.target, "Target model id");
  c_audit->add_option("--classifier", aud.classifier, "heuristic|judge");
  c_audit->add_option("--judge", aud.judge, "Judge model id for judge classification");

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep-categories", "Generate per-category questions and audit them");
  add_common(c_sweep);
  c_sweep->add_option("--categories", sweep.categories, "Category set file");
  c_sweep->add_option("--n", sweep.n, "Questions per category (default 30)")->check(CLI::PositiveNumber);
  c_sweep->add_option("--generator", sweep.generator, "Generator model id");
  c_sweep->add_option("--target", sweep.target, "Target model id");
  c_sweep->add_option("--classifier", sweep.classifier, "heuristic|judge");

  MultiArgs multi;
  auto* c_multi = app.add_subcommand("audit-multilingual", "Translate a dataset and audit each language");
  add_common(c_multi);
  c_multi->add_option("--dataset", multi.dataset, "Dataset file (default <out>/dataset.jsonl)");
  c_multi->add_option("--languages", multi.languages, "Target languages")->delimiter(',');
  c_multi->add_option("--translator", multi.translator, "Translator model id");
  c_multi->add_option("--target", multi.target, "Target model id");
  c_multi->add_option("--classifier", multi.classifier, "judge (default) or heuristic");

  TaskArgs task;
  auto* c_task = app.add_subcommand("audit-task", "Audit documents wrapped in a summarize/translate task");
  add_common(c_task);
  c_task->add_option("--documents", task.documents, "Documents file (one {\"text\": ...} per line)");
  c_task->add_option("--task", task.task, "summarize|translate")->check(CLI::IsMember({"summarize", "translate"}));
  c_task->add_option("--target", task.target, "Target model id");
  c_task->add_option("--classifier", task.classifier, "heuristic|judge");

  JailbreakArgs jb;
  auto* c_jb = app.add_subcommand("jailbreak", "Run the reasoning-trigger bypass campaign");
  add_common(c_jb);
  c_jb->add_option("--dataset", jb.dataset, "Dataset file (default <out>/dataset.jsonl)");
  c_jb->add_option("--k", jb.k, "Maximum iterations")->check(CLI::PositiveNumber);
  c_jb->add_option("--trigger", jb.trigger, "Introductory phrase placed after the open delimiter");
  c_jb->add_option("--target", jb.target, "Target model id");
  c_jb->add_option("--classifier", jb.classifier, "heuristic|judge");

  InjectArgs inj;
  auto* c_inj = app.add_subcommand("inject", "Build a distillation corpus with injected censored samples");
  add_common(c_inj);
  c_inj->add_option("--strategy", inj.strategy, "random|diverse|refusal")
      ->check(CLI::IsMember({"random", "diverse", "refusal"}));
  c_inj->add_option("--n", inj.n, "Number of injected samples")->check(CLI::NonNegativeNumber);
  c_inj->add_option("--seed", inj.seed, "Selection seed (default: config seed)");
  c_inj->add_option("--base", inj.base, "Base training corpus");
  c_inj->add_option("--pool", inj.pool, "Censored pool (default <out>/journals/audit.jsonl)");
  c_inj->add_option("--judge", inj.judge, "Judge model id for the diverse strategy");

  CompareArgs cmp;
  auto* c_cmp = app.add_subcommand("compare", "Pairwise judge comparison of two answer journals");
  add_common(c_cmp);
  c_cmp->add_option("--a", cmp.a, "Journal with answers A")->required();
  c_cmp->add_option("--b", cmp.b, "Journal with answers B")->required();
  c_cmp->add_option("--reference", cmp.reference, "Journal with reference answers (alignment)");
  c_cmp->add_option("--dimension", cmp.dimension, "factuality|alignment")
      ->check(CLI::IsMember({"factuality", "alignment"}));
  c_cmp->add_option("--judge", cmp.judge, "Judge model id");
  c_cmp->add_option("--per-source", cmp.per_source, "Sample this many prompts per source (0 = all)");
  c_cmp->add_option("--seed", cmp.seed, "Order randomization seed (default: config seed)");

  ReportArgs rep;
  auto* c_rep = app.add_subcommand("report", "Render tables and figure data from journals");
  add_common(c_rep);
  c_rep->add_option("--journals", rep.journals, "Journal directory or file (default <out>)");
  c_rep->add_option("--generated-at", rep.generated_at, "Timestamp string recorded in the report");
  c_rep->add_option("--title", rep.title, "Report title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsageError;
  }

  auto logger = spdlog::get("censaudit");
  if (!logger) logger = spdlog::stderr_color_mt("censaudit");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(log_level));

  auto* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  std::vector<std::string> args(argv + 1, argv + argc);
  Manifest manifest(command, args);
  std::optional<fs::path> out_dir;
  int rc = kOk;
  std::string error;
  try {
    Run run = load_run(common, manifest);
    out_dir = run.out;
    if (command == "curate") cmd_curate(run, curate, manifest);
    else if (command == "audit") cmd_audit(run, aud, manifest);
    else if (command == "sweep-categories") cmd_sweep(run, sweep, manifest);
    else if (command == "audit-multilingual") cmd_multilingual(run, multi, manifest);
    else if (command == "audit-task") cmd_task(run, task, manifest);
    else if (command == "jailbreak") cmd_jailbreak(run, jb, manifest);
    else if (command == "inject") cmd_inject(run, inj, manifest);
    else if (command == "compare") cmd_compare(run, cmp, manifest);
    else if (command == "report") cmd_report(run, rep, manifest);
    manifest.note("network_requests", run.gw->network_requests());
    manifest.note("cache_hits", run.gw->cache_hits());
  } catch (const std::exception& e) {
    rc = kOperationalError;
    error = e.what();
    std::cerr << "error: " << e.what() << "\n";
  }
  if (out_dir) {
    try {
      manifest.write(*out_dir, rc, error);
    } catch (const std::exception& e) {
      std::cerr << "error: could not write run manifest: " << e.what() << "\n";
      rc = kOperationalError;
    }
  }
  return rc;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace censaudit::cli
