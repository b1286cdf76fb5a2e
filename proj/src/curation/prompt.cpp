#include "censaudit/curation/prompt.hpp"

#include "censaudit/assets.hpp"
#include "censaudit/hashing.hpp"
#include "censaudit/jsonl.hpp"
#include "censaudit/text.hpp"

#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace censaudit::curation {

std::string_view to_string(Source s) {
  switch (s) {
    case Source::reddit: return "reddit";
    case Source::twitter: return "twitter";
    case Source::llm: return "llm";
  }
  return "llm";
}

Source source_from_string(std::string_view s) {
  if (s == "reddit") return Source::reddit;
  if (s == "twitter" || s == "x") return Source::twitter;
  if (s == "llm") return Source::llm;
  throw std::invalid_argument("unknown prompt source: " + std::string(s));
}

std::string prompt_id(std::string_view t) {
  return sha256_hex(text::normalize_whitespace(t)).substr(0, 16);
}

Prompt Prompt::make(std::string text, Source source, std::string created_from) {
  Prompt p;
  p.id = prompt_id(text);
  p.text = std::move(text);
  p.source = source;
  p.created_from = std::move(created_from);
  return p;
}

json to_json(const Prompt& p) {
  json j{{"id", p.id}, {"text", p.text}, {"source", to_string(p.source)}, {"created_from", p.created_from}};
  j["language"] = p.language ? json(*p.language) : json(nullptr);
  j["category"] = p.category ? json(*p.category) : json(nullptr);
  if (p.verdict) j["verdict"] = classifier::to_json(*p.verdict);
  if (!p.meta.empty()) j["meta"] = p.meta;
  return j;
}

Prompt prompt_from_json(const json& j) {
  Prompt p;
  p.text = j.at("text").get<std::string>();
  p.id = j.contains("id") && j.at("id").is_string() ? j.at("id").get<std::string>() : prompt_id(p.text);
  p.source = source_from_string(j.at("source").get<std::string>());
  p.created_from = j.value("created_from", "");
  if (j.contains("language") && j.at("language").is_string()) p.language = j.at("language").get<std::string>();
  if (j.contains("category") && j.at("category").is_string()) p.category = j.at("category").get<std::string>();
  if (j.contains("verdict") && j.at("verdict").is_object()) p.verdict = classifier::verdict_from_json(j.at("verdict"));
  if (j.contains("meta") && j.at("meta").is_object()) p.meta = j.at("meta");
  return p;
}

IngestResult ingest_corpus(const std::filesystem::path& path) {
  auto raw = read_jsonl(path);
  IngestResult r;
  r.total_lines = raw.total_lines;
  r.skipped_lines = raw.skipped_lines;
  for (const auto& rec : raw.records) {
    try {
      auto p = prompt_from_json(rec);
      if (p.created_from.empty()) p.created_from = "ingest:" + path.filename().string();
      r.prompts.push_back(std::move(p));
    } catch (const std::exception&) {
      ++r.skipped_lines;
    }
  }
  return r;
}

std::vector<Prompt> read_dataset(const std::filesystem::path& path) {
  auto raw = read_jsonl(path);
  if (raw.skipped_lines > 0) {
    throw std::runtime_error(path.string() + ": " + std::to_string(raw.skipped_lines) + " corrupt lines");
  }
  std::vector<Prompt> out;
  out.reserve(raw.records.size());
  for (const auto& rec : raw.records) out.push_back(prompt_from_json(rec));
  return out;
}

void write_dataset(const std::filesystem::path& path, const std::vector<Prompt>& prompts) {
  std::vector<json> rows;
  rows.reserve(prompts.size());
  for (const auto& p : prompts) rows.push_back(to_json(p));
  write_jsonl(path, rows);
}

std::string_view to_string(CategoryKind k) {
  switch (k) {
    case CategoryKind::individual: return "individual";
    case CategoryKind::incident: return "incident";
    case CategoryKind::other: return "other";
  }
  return "other";
}

void CategorySet::validate() const {
  if (entries.empty()) throw std::invalid_argument("category set is empty");
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (e.name.empty()) throw std::invalid_argument("category with empty name");
    if (!seen.insert(e.name).second) throw std::invalid_argument("duplicate category: " + e.name);
  }
}

bool CategorySet::contains(std::string_view name) const {
  for (const auto& e : entries) {
    if (e.name == name) return true;
  }
  return false;
}

std::vector<std::string> CategorySet::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries) out.push_back(e.name);
  return out;
}

CategorySet CategorySet::from_json(const json& j) {
  CategorySet set;
  const auto& list = j.is_array() ? j : j.at("categories");
  for (const auto& c : list) {
    CategoryEntry e;
    if (c.is_string()) {
      e.name = c.get<std::string>();
    } else {
      e.name = c.at("name").get<std::string>();
      auto kind = c.value("kind", std::string("other"));
      if (kind == "individual") e.kind = CategoryKind::individual;
      else if (kind == "incident") e.kind = CategoryKind::incident;
      else if (kind == "other") e.kind = CategoryKind::other;
      else throw std::invalid_argument("unknown category kind: " + kind);
      if (c.contains("parent") && c.at("parent").is_string()) e.parent = c.at("parent").get<std::string>();
    }
    set.entries.push_back(std::move(e));
  }
  set.validate();
  return set;
}

CategorySet CategorySet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("category file not found: " + path.string());
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw std::runtime_error("category file is not JSON: " + path.string());
  return from_json(j);
}

CategorySet CategorySet::defaults() { return from_json(json::parse(assets::get("categories.json"))); }

json to_json(const StageReport& r) {
  return json{{"stage", r.stage_name},
              {"in_count", r.in_count},
              {"out_count", r.out_count},
              {"removed_ids", r.removed_ids},
              {"needs_review_ids", r.needs_review_ids}};
}

StageReport report_from_json(const json& j) {
  StageReport r;
  r.stage_name = j.at("stage").get<std::string>();
  r.in_count = j.at("in_count").get<size_t>();
  r.out_count = j.at("out_count").get<size_t>();
  r.removed_ids = j.value("removed_ids", std::vector<std::string>{});
  r.needs_review_ids = j.value("needs_review_ids", std::vector<std::string>{});
  return r;
}

StageReport make_report(std::string stage_name, const std::vector<Prompt>& in,
                        const std::vector<Prompt>& out) {
  StageReport r;
  r.stage_name = std::move(stage_name);
  r.in_count = in.size();
  r.out_count = out.size();
  std::unordered_multiset<std::string> kept;
  for (const auto& p : out) kept.insert(p.id);
  for (const auto& p : in) {
    auto it = kept.find(p.id);
    if (it == kept.end()) {
      r.removed_ids.push_back(p.id);
    } else {
      kept.erase(it);
    }
  }
  return r;
}

}  // namespace censaudit::curation
