#include "censaudit/audit/audit.hpp"
#include "censaudit/jsonl.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace censaudit::audit {

std::string_view to_string(TaskMode t) {
  switch (t) {
    case TaskMode::qa: return "qa";
    case TaskMode::summarize: return "summarize";
    case TaskMode::translate: return "translate";
  }
  return "qa";
}

TaskMode task_mode_from_string(std::string_view s) {
  if (s == "qa") return TaskMode::qa;
  if (s == "summarize") return TaskMode::summarize;
  if (s == "translate") return TaskMode::translate;
  throw std::invalid_argument("unknown task mode: " + std::string(s));
}

std::string AuditRecord::key() const {
  return prompt_id + "|" + model_id + "|" + language + "|" + std::string(to_string(task_mode));
}

namespace {

json completion_json(const Completion& c) {
  json j{{"raw", c.raw}, {"final", c.final}, {"open_present", c.open_present}};
  j["reasoning"] = c.reasoning ? json(*c.reasoning) : json(nullptr);
  if (!c.leading.empty()) j["leading"] = c.leading;
  if (!c.gap.empty()) j["gap"] = c.gap;
  return j;
}

Completion completion_from(const json& j) {
  Completion c;
  c.raw = j.at("raw").get<std::string>();
  c.final = j.value("final", "");
  if (j.contains("reasoning") && j.at("reasoning").is_string()) c.reasoning = j.at("reasoning").get<std::string>();
  c.leading = j.value("leading", "");
  c.gap = j.value("gap", "");
  c.open_present = j.value("open_present", false);
  return c;
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  if (j.contains(key) && j.at(key).is_string()) return j.at(key).get<std::string>();
  return std::nullopt;
}

}  // namespace

json to_json(const AuditRecord& r) {
  json j{{"kind", "audit"},
         {"prompt_id", r.prompt_id},
         {"model_id", r.model_id},
         {"params", gateway::to_json(r.params)},
         {"prompt_sent", r.prompt_sent},
         {"language", r.language},
         {"task_mode", to_string(r.task_mode)}};
  j["category"] = r.category ? json(*r.category) : json(nullptr);
  j["source"] = r.source ? json(*r.source) : json(nullptr);
  if (r.completion) j["completion"] = completion_json(*r.completion);
  if (r.verdict) j["verdict"] = classifier::to_json(*r.verdict);
  if (r.error) j["error"] = {{"kind", r.error->kind}, {"message", r.error->message}};
  return j;
}

AuditRecord audit_record_from_json(const json& j) {
  if (j.value("kind", "") != "audit") throw std::invalid_argument("not an audit record");
  AuditRecord r;
  r.prompt_id = j.at("prompt_id").get<std::string>();
  r.model_id = j.at("model_id").get<std::string>();
  r.params = gateway::params_from_json(j.value("params", json::object()));
  r.prompt_sent = j.value("prompt_sent", "");
  r.language = j.value("language", "en");
  r.task_mode = task_mode_from_string(j.value("task_mode", "qa"));
  r.category = opt_string(j, "category");
  r.source = opt_string(j, "source");
  if (j.contains("completion")) r.completion = completion_from(j.at("completion"));
  if (j.contains("verdict")) r.verdict = classifier::verdict_from_json(j.at("verdict"));
  if (j.contains("error")) {
    const auto& e = j.at("error");
    r.error = AuditError{e.value("kind", "transport"), e.value("message", "")};
  }
  return r;
}

JournalRead read_audit_journal(const std::filesystem::path& path) {
  auto raw = read_jsonl(path);
  JournalRead out;
  out.total_lines = raw.total_lines;
  out.skipped_lines = raw.skipped_lines;
  for (const auto& j : raw.records) {
    try {
      out.records.push_back(audit_record_from_json(j));
    } catch (const std::exception&) {
      ++out.skipped_lines;
    }
  }
  return out;
}

std::string_view to_string(Grouping g) {
  switch (g) {
    case Grouping::category: return "category";
    case Grouping::language: return "language";
    case Grouping::source: return "source";
    case Grouping::model: return "model";
    case Grouping::task: return "task";
  }
  return "category";
}

Grouping grouping_from_string(std::string_view s) {
  if (s == "category") return Grouping::category;
  if (s == "language") return Grouping::language;
  if (s == "source") return Grouping::source;
  if (s == "model") return Grouping::model;
  if (s == "task") return Grouping::task;
  throw std::invalid_argument("unknown grouping: " + std::string(s));
}

const RateRow* RateTable::find(std::string_view key) const {
  for (const auto& r : rows) {
    if (r.key == key) return &r;
  }
  return nullptr;
}

size_t RateTable::total() const {
  size_t n = 0;
  for (const auto& r : rows) n += r.total;
  return n;
}

size_t RateTable::censored() const {
  size_t n = 0;
  for (const auto& r : rows) n += r.censored_count;
  return n;
}

RateTable tabulate(const std::vector<AuditRecord>& records, Grouping grouping) {
  std::map<std::string, RateRow> rows;
  for (const auto& r : records) {
    std::optional<std::string> k;
    switch (grouping) {
      case Grouping::category: k = r.category; break;
      case Grouping::language: k = r.language; break;
      case Grouping::source: k = r.source; break;
      case Grouping::model: k = r.model_id; break;
      case Grouping::task: k = std::string(to_string(r.task_mode)); break;
    }
    auto key = k.value_or("(none)");
    auto& row = rows[key];
    row.key = key;
    if (!r.ok()) {
      ++row.errors;
      continue;
    }
    ++row.total;
    switch (r.verdict->label) {
      case classifier::Label::type1: ++row.type1; break;
      case classifier::Label::type2: ++row.type2; break;
      case classifier::Label::type3: ++row.type3; break;
      case classifier::Label::not_censored: break;
    }
  }
  RateTable t;
  t.grouping = grouping;
  for (auto& [key, row] : rows) {
    row.censored_count = row.type1 + row.type2 + row.type3;
    row.rate = row.total ? static_cast<double>(row.censored_count) / static_cast<double>(row.total) : 0.0;
    t.rows.push_back(row);
  }
  return t;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const RateTable& t) {
  std::ostringstream os;
  os << to_string(t.grouping) << ",censored,total,rate,type1,type2,type3,errors\n";
  for (const auto& r : t.rows) {
    os << csv_field(r.key) << ',' << r.censored_count << ',' << r.total << ',' << std::fixed
       << std::setprecision(6) << r.rate << ',' << r.type1 << ',' << r.type2 << ',' << r.type3 << ','
       << r.errors << '\n';
  }
  return os.str();
}

json to_json(const RateTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"key", r.key},
                    {"censored", r.censored_count},
                    {"total", r.total},
                    {"rate", r.rate},
                    {"type1", r.type1},
                    {"type2", r.type2},
                    {"type3", r.type3},
                    {"errors", r.errors}});
  }
  return {{"grouping", to_string(t.grouping)}, {"rows", rows}};
}

RateTable rate_table_from_json(const json& j) {
  RateTable t;
  t.grouping = grouping_from_string(j.at("grouping").get<std::string>());
  for (const auto& r : j.at("rows")) {
    RateRow row;
    row.key = r.at("key").get<std::string>();
    row.censored_count = r.at("censored").get<size_t>();
    row.total = r.at("total").get<size_t>();
    row.rate = r.at("rate").get<double>();
    row.type1 = r.value("type1", size_t{0});
    row.type2 = r.value("type2", size_t{0});
    row.type3 = r.value("type3", size_t{0});
    row.errors = r.value("errors", size_t{0});
    t.rows.push_back(row);
  }
  return t;
}

}  // namespace censaudit::audit
