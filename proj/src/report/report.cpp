#include "censaudit/report/report.hpp"

#include "censaudit/hashing.hpp"
#include "censaudit/jailbreak/jailbreak.hpp"
#include "censaudit/jsonl.hpp"
#include "censaudit/judge_eval/judge_eval.hpp"
#include "censaudit/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace censaudit::report {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int digits = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

SourceStats stats_for(std::string name, const std::vector<const curation::Prompt*>& items, size_t n_all) {
  SourceStats s;
  s.source = std::move(name);
  s.count = items.size();
  s.proportion = n_all ? 100.0 * static_cast<double>(items.size()) / static_cast<double>(n_all) : 0.0;
  double sum = 0.0;
  for (const auto* p : items) sum += static_cast<double>(text::whitespace_token_count(p->text));
  s.mean_tokens = items.empty() ? 0.0 : sum / static_cast<double>(items.size());
  double var = 0.0;
  for (const auto* p : items) {
    const double d = static_cast<double>(text::whitespace_token_count(p->text)) - s.mean_tokens;
    var += d * d;
  }
  s.sd_tokens = items.empty() ? 0.0 : std::sqrt(var / static_cast<double>(items.size()));
  for (const auto* p : items) {
    if (!p->verdict) continue;
    if (p->verdict->label == classifier::Label::type1) ++s.type1;
    if (p->verdict->label == classifier::Label::type2) ++s.type2;
  }
  const size_t typed = s.type1 + s.type2;
  if (typed) {
    s.type1_share = 100.0 * static_cast<double>(s.type1) / static_cast<double>(typed);
    s.type2_share = 100.0 * static_cast<double>(s.type2) / static_cast<double>(typed);
  }
  return s;
}

bool skipped_dir(const fs::path& rel) {
  static const std::set<std::string> kSkip{"cache", "stages", "needs_review", "report"};
  for (auto it = rel.begin(); it != rel.end(); ++it) {
    if (std::next(it) == rel.end()) break;
    if (kSkip.count(it->string())) return true;
  }
  return false;
}

std::string rate_table_text(const audit::RateTable& t) {
  std::ostringstream os;
  os << "  " << std::left << std::setw(40) << to_string(t.grouping) << std::right << std::setw(9) << "censored"
     << std::setw(8) << "total" << std::setw(9) << "rate%" << std::setw(7) << "T1" << std::setw(7) << "T2"
     << std::setw(7) << "T3" << "\n";
  for (const auto& r : t.rows) {
    os << "  " << std::left << std::setw(40) << r.key << std::right << std::setw(9) << r.censored_count
       << std::setw(8) << r.total << std::setw(9) << fixed(100.0 * r.rate) << std::setw(7) << r.type1
       << std::setw(7) << r.type2 << std::setw(7) << r.type3 << "\n";
  }
  return os.str();
}

}  // namespace

DatasetStatistics dataset_statistics(const std::vector<curation::Prompt>& dataset) {
  DatasetStatistics out;
  std::vector<const curation::Prompt*> all;
  for (auto src : {curation::Source::reddit, curation::Source::twitter, curation::Source::llm}) {
    std::vector<const curation::Prompt*> items;
    for (const auto& p : dataset) {
      if (p.source == src) items.push_back(&p);
    }
    if (items.empty()) continue;
    out.rows.push_back(stats_for(std::string(curation::to_string(src)), items, dataset.size()));
  }
  if (!dataset.empty()) {
    for (const auto& p : dataset) all.push_back(&p);
    out.rows.push_back(stats_for("all", all, dataset.size()));
  }
  return out;
}

std::string to_csv(const DatasetStatistics& s) {
  std::ostringstream os;
  os << "source,count,proportion_pct,mean_tokens,sd_tokens,type1,type2,type1_pct,type2_pct\n";
  for (const auto& r : s.rows) {
    os << r.source << ',' << r.count << ',' << fixed(r.proportion) << ',' << fixed(r.mean_tokens) << ','
       << fixed(r.sd_tokens) << ',' << r.type1 << ',' << r.type2 << ',' << fixed(r.type1_share) << ','
       << fixed(r.type2_share) << '\n';
  }
  return os.str();
}

FigureData distribution_export(const std::vector<audit::AuditRecord>& records, const DistributionOptions& opts) {
  std::vector<audit::AuditRecord> kept;
  std::string name = "distribution_by_" + std::string(audit::to_string(opts.grouping));
  if (opts.kind && opts.categories) {
    std::set<std::string> allowed;
    for (const auto& e : opts.categories->entries) {
      if (e.kind == *opts.kind) allowed.insert(e.name);
    }
    for (const auto& r : records) {
      if (r.category && allowed.count(*r.category)) kept.push_back(r);
    }
    name += "_" + std::string(curation::to_string(*opts.kind));
  } else {
    kept = records;
  }
  auto table = audit::tabulate(kept, opts.grouping);
  std::ostringstream os;
  os << "key,total,censored,rate,type1,type2,type3\n";
  for (const auto& r : table.rows) {
    if (r.total == 0) continue;
    os << csv_field(r.key) << ',' << r.total << ',' << r.censored_count << ',' << fixed(r.rate, 6) << ','
       << r.type1 << ',' << r.type2 << ',' << r.type3 << '\n';
  }
  return {name, os.str()};
}

Report build_report(const fs::path& root, const ReportConfig& cfg) {
  Report rep;
  rep.title = cfg.title;
  rep.generated_at = cfg.generated_at;

  std::vector<fs::path> files;
  if (fs::is_directory(root)) {
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (!e.is_regular_file() || e.path().extension() != ".jsonl") continue;
      auto rel = fs::relative(e.path(), root);
      if (skipped_dir(rel)) continue;
      files.push_back(e.path());
    }
  } else if (fs::is_regular_file(root)) {
    files.push_back(root);
  } else {
    throw std::runtime_error("journal path not found: " + root.string());
  }
  std::sort(files.begin(), files.end());

  std::vector<curation::Prompt> dataset;
  std::vector<audit::AuditRecord> audits;
  std::vector<jailbreak::BypassOutcome> bypasses;
  std::vector<judge_eval::JudgeVerdict> verdicts;

  for (const auto& f : files) {
    InputFile in;
    in.path = fs::is_directory(root) ? fs::relative(f, root).generic_string() : f.filename().string();
    in.sha256 = sha256_file(f);
    auto raw = read_jsonl(f);
    in.total_lines = raw.total_lines;
    in.corrupt_lines = raw.skipped_lines;
    for (const auto& j : raw.records) {
      const auto kind = j.value("kind", "");
      try {
        if (kind == "audit") {
          audits.push_back(audit::audit_record_from_json(j));
        } else if (kind == "jailbreak") {
          bypasses.push_back(jailbreak::bypass_outcome_from_json(j));
        } else if (kind == "judge_verdict") {
          verdicts.push_back(judge_eval::judge_verdict_from_json(j));
        } else if (kind.empty() && j.contains("text") && j.contains("source") && j.contains("id")) {
          dataset.push_back(curation::prompt_from_json(j));
        } else {
          ++in.unrecognized_lines;
          continue;
        }
        ++in.parsed_lines;
      } catch (const std::exception&) {
        ++in.corrupt_lines;
      }
    }
    rep.inputs.push_back(in);
  }

  // Resumed runs append retried slots; the latest successful record per slot wins.
  {
    std::map<std::string, size_t> slot;
    std::vector<audit::AuditRecord> unique;
    for (auto& r : audits) {
      auto [it, fresh] = slot.emplace(r.key(), unique.size());
      if (fresh) unique.push_back(std::move(r));
      else if (r.ok() || !unique[it->second].ok()) unique[it->second] = std::move(r);
    }
    audits = std::move(unique);
  }
  {
    std::map<std::string, size_t> slot;
    std::vector<jailbreak::BypassOutcome> unique;
    for (auto& o : bypasses) {
      auto [it, fresh] = slot.emplace(o.prompt_id + "|" + o.model_id, unique.size());
      if (fresh) unique.push_back(std::move(o));
      else if (!o.error || unique[it->second].error) unique[it->second] = std::move(o);
    }
    bypasses = std::move(unique);
  }

  std::ostringstream summary;
  summary << rep.title << "\n";
  summary << "generated_at: " << rep.generated_at << "\n\n";
  if (rep.inputs.empty()) {
    summary << "*** no inputs: no journal files were found under the given path ***\n";
    rep.summary_text = summary.str();
    return rep;
  }
  summary << "Inputs\n";
  for (const auto& in : rep.inputs) {
    summary << "  " << in.path << "  sha256=" << in.sha256 << "  lines=" << in.total_lines
            << " parsed=" << in.parsed_lines << " corrupt=" << in.corrupt_lines
            << " unrecognized=" << in.unrecognized_lines << "\n";
  }
  summary << "\n";

  if (!dataset.empty()) {
    auto stats = dataset_statistics(dataset);
    rep.tables.push_back({"dataset_statistics", to_csv(stats)});
    summary << "Dataset statistics by source\n";
    for (const auto& r : stats.rows) {
      summary << "  " << std::left << std::setw(8) << r.source << std::right << std::setw(7) << r.count
              << std::setw(9) << fixed(r.proportion) << "%  tokens " << fixed(r.mean_tokens) << " +/- "
              << fixed(r.sd_tokens) << "  Type1 " << fixed(r.type1_share) << "%  Type2 " << fixed(r.type2_share)
              << "%\n";
    }
    summary << "\n";
  }

  if (!audits.empty()) {
    for (auto g : {audit::Grouping::model, audit::Grouping::source, audit::Grouping::language,
                   audit::Grouping::task, audit::Grouping::category}) {
      auto t = audit::tabulate(audits, g);
      if (t.rows.size() == 1 && t.rows[0].key == "(none)") continue;
      rep.tables.push_back({"rates_by_" + std::string(audit::to_string(g)), audit::to_csv(t)});
      summary << "Censorship rates by " << audit::to_string(g) << "\n" << rate_table_text(t) << "\n";
    }
    rep.figures.push_back(distribution_export(audits, {audit::Grouping::category, std::nullopt, std::nullopt}));
    if (cfg.categories) {
      for (auto k : {curation::CategoryKind::individual, curation::CategoryKind::incident}) {
        rep.figures.push_back(distribution_export(audits, {audit::Grouping::category, k, cfg.categories}));
      }
    }
  }

  if (!bypasses.empty()) {
    int k = 1;
    for (const auto& o : bypasses) k = std::max(k, o.iterations_used);
    auto s = jailbreak::summarize(bypasses, k);
    std::ostringstream csv;
    csv << "total,bypassed,bypassed_uncensored,failed,errors,type1,type2,type3,bypass_rate\n"
        << s.total << ',' << s.bypassed << ',' << s.bypassed_uncensored << ',' << s.failed << ',' << s.errors << ','
        << s.type1 << ',' << s.type2 << ',' << s.type3 << ',' << fixed(s.bypass_rate, 6) << '\n';
    rep.tables.push_back({"jailbreak_summary", csv.str()});
    rep.figures.push_back({"jailbreak_histogram", jailbreak::histogram_csv(s)});
    summary << "Jailbreak campaign\n  outcomes " << s.total << ", bypassed " << s.bypassed << " ("
            << s.bypassed_uncensored << " uncensored), failed " << s.failed << ", errors " << s.errors
            << "\n  bypass rate " << fixed(100.0 * s.bypass_rate) << "%  residual Type1 " << s.type1 << ", Type2 "
            << s.type2 << ", Type3 " << s.type3 << "\n\n";
  }

  if (!verdicts.empty()) {
    auto s = judge_eval::aggregate(verdicts);
    rep.tables.push_back({"judge_summary", judge_eval::to_csv(s)});
    summary << "Pairwise judge comparisons\n";
    for (const auto& r : s.rows) {
      summary << "  " << judge_eval::to_string(r.dimension) << ": A " << fixed(r.pct_a) << "% vs B "
              << fixed(r.pct_b) << "% over " << r.total << "; positional skew " << fixed(r.positional_skew)
              << (r.bias_flagged ? " (FLAGGED)" : "") << "\n";
    }
    summary << "\n";
  }

  if (rep.tables.empty()) summary << "No recognized records in the inputs.\n\n";
  summary << "Token lengths are whitespace-delimited counts; +/- is the population standard deviation.\n";
  rep.summary_text = summary.str();
  return rep;
}

std::vector<fs::path> write_report(const Report& r, const fs::path& output_dir) {
  const fs::path base = output_dir / "report";
  fs::create_directories(base / "tables");
  fs::create_directories(base / "figures");
  std::vector<fs::path> written;
  auto put = [&](const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
    written.push_back(p);
  };
  put(base / "summary.txt", r.summary_text);
  json inputs = json::array();
  for (const auto& in : r.inputs) {
    inputs.push_back({{"path", in.path},
                      {"sha256", in.sha256},
                      {"total_lines", in.total_lines},
                      {"parsed_lines", in.parsed_lines},
                      {"corrupt_lines", in.corrupt_lines},
                      {"unrecognized_lines", in.unrecognized_lines}});
  }
  json tables = json::array();
  for (const auto& t : r.tables) {
    tables.push_back(t.name);
    put(base / "tables" / (t.name + ".csv"), t.csv);
  }
  json figures = json::array();
  for (const auto& f : r.figures) {
    figures.push_back(f.name);
    put(base / "figures" / (f.name + ".csv"), f.csv);
  }
  put(base / "report.json", json{{"title", r.title},
                                  {"generated_at", r.generated_at},
                                  {"inputs", inputs},
                                  {"tables", tables},
                                  {"figures", figures}}
                                .dump(2) + "\n");
  return written;
}

}  // namespace censaudit::report
