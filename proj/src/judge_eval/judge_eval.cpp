#include "censaudit/judge_eval/judge_eval.hpp"

#include "censaudit/assets.hpp"
#include "censaudit/audit/audit.hpp"
#include "censaudit/jailbreak/jailbreak.hpp"
#include "censaudit/jsonl.hpp"
#include "censaudit/parallel.hpp"
#include "censaudit/rng.hpp"
#include "censaudit/text.hpp"

#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

namespace censaudit::judge_eval {

std::string_view to_string(Winner w) { return w == Winner::A ? "A" : "B"; }
std::string_view to_string(Dimension d) { return d == Dimension::factuality ? "factuality" : "alignment"; }
std::string_view to_string(Order o) { return o == Order::AB ? "AB" : "BA"; }

Dimension dimension_from_string(std::string_view s) {
  if (s == "factuality") return Dimension::factuality;
  if (s == "alignment") return Dimension::alignment;
  throw std::invalid_argument("unknown comparison dimension: " + std::string(s));
}

json to_json(const JudgeVerdict& v) {
  return {{"kind", "judge_verdict"},
          {"prompt_id", v.prompt_id},
          {"winner", to_string(v.winner)},
          {"dimension", to_string(v.dimension)},
          {"justification", v.justification},
          {"presented_order", to_string(v.presented_order)}};
}

JudgeVerdict judge_verdict_from_json(const json& j) {
  JudgeVerdict v;
  v.prompt_id = j.value("prompt_id", "");
  v.winner = j.at("winner").get<std::string>() == "B" ? Winner::B : Winner::A;
  v.dimension = dimension_from_string(j.at("dimension").get<std::string>());
  v.justification = j.value("justification", "");
  v.presented_order = j.at("presented_order").get<std::string>() == "BA" ? Order::BA : Order::AB;
  return v;
}

Order presentation_order(uint64_t seed, std::string_view question, std::string_view a, std::string_view b) {
  uint64_t h = fnv1a64(question);
  h = fnv1a64(std::string_view("\0", 1), h);
  h = fnv1a64(a, h);
  h = fnv1a64(std::string_view("\0", 1), h);
  h = fnv1a64(b, h);
  return (splitmix64(seed ^ h) & 1ULL) ? Order::BA : Order::AB;
}

std::optional<std::pair<int, std::string>> parse_choice(std::string_view reply) {
  auto j = extract_json(reply);
  if (!j || !j->is_object() || !j->contains("choice")) return std::nullopt;
  const auto& c = j->at("choice");
  int choice = 0;
  if (c.is_number_integer()) choice = c.get<int>();
  else if (c.is_string() && (c.get<std::string>() == "1" || c.get<std::string>() == "2")) choice = std::stoi(c.get<std::string>());
  if (choice != 1 && choice != 2) return std::nullopt;
  if (!j->contains("justification") || !j->at("justification").is_string()) return std::nullopt;
  auto just = std::string(text::trim(j->at("justification").get<std::string>()));
  if (just.empty()) return std::nullopt;
  return std::make_pair(choice, just);
}

gateway::ChatPrompt factuality_prompt(std::string_view question, std::string_view first, std::string_view second) {
  return {assets::prompt("factuality_judge.system"),
          assets::fill(assets::prompt("factuality_judge.user"),
                       {{"question", std::string(question)}, {"first", std::string(first)}, {"second", std::string(second)}})};
}

gateway::ChatPrompt alignment_prompt(std::string_view question, std::string_view first, std::string_view second,
                                     std::string_view reference) {
  return {assets::prompt("alignment_judge.system"),
          assets::fill(assets::prompt("alignment_judge.user"), {{"question", std::string(question)},
                                                                {"first", std::string(first)},
                                                                {"second", std::string(second)},
                                                                {"reference", std::string(reference)}})};
}

namespace {

JudgeVerdict run_comparison(gateway::Gateway& gw, Dimension dim, std::string_view question, std::string_view a,
                            std::string_view b, std::string_view reference, const gateway::ModelSpec& judge,
                            const CompareOptions& opts) {
  if (a.empty() || b.empty()) throw std::invalid_argument("both answers must be non-empty");
  if (dim == Dimension::alignment && reference.empty()) throw std::invalid_argument("reference answer must be non-empty");
  if (judge.role != gateway::Role::judge) throw gateway::ConfigurationError("model '" + judge.id + "' is not a judge");

  const auto order = presentation_order(opts.seed, question, a, b);
  const auto first = order == Order::AB ? a : b;
  const auto second = order == Order::AB ? b : a;
  auto prompt = dim == Dimension::factuality ? factuality_prompt(question, first, second)
                                             : alignment_prompt(question, first, second, reference);
  auto params = judge.default_params;
  params.temperature = 0.0;

  std::string last;
  for (int ask = 0; ask < std::max(1, opts.max_asks); ++ask) {
    if (ask > 0) prompt.user += "\n\nReply with only the JSON object {\"choice\": 1 or 2, \"justification\": \"...\"}.";
    last = gw.complete(judge, prompt, params).text;
    if (auto parsed = parse_choice(last)) {
      JudgeVerdict v;
      v.dimension = dim;
      v.presented_order = order;
      v.justification = parsed->second;
      const bool first_won = parsed->first == 1;
      v.winner = (first_won == (order == Order::AB)) ? Winner::A : Winner::B;
      return v;
    }
  }
  throw classifier::JudgeFormatError("judge '" + judge.id + "' never returned a valid choice", last);
}

std::string pct(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

}  // namespace

JudgeVerdict compare_factuality(gateway::Gateway& gw, std::string_view question, std::string_view answer_a,
                                std::string_view answer_b, const gateway::ModelSpec& judge,
                                const CompareOptions& opts) {
  return run_comparison(gw, Dimension::factuality, question, answer_a, answer_b, {}, judge, opts);
}

JudgeVerdict compare_alignment(gateway::Gateway& gw, std::string_view question, std::string_view answer_a,
                               std::string_view answer_b, std::string_view reference_answer,
                               const gateway::ModelSpec& judge, const CompareOptions& opts) {
  return run_comparison(gw, Dimension::alignment, question, answer_a, answer_b, reference_answer, judge, opts);
}

JudgeSummary aggregate(const std::vector<JudgeVerdict>& verdicts) {
  JudgeSummary s;
  for (auto dim : {Dimension::factuality, Dimension::alignment}) {
    DimensionSummary row;
    row.dimension = dim;
    for (const auto& v : verdicts) {
      if (v.dimension != dim) continue;
      ++row.total;
      const bool a_won = v.winner == Winner::A;
      (a_won ? row.wins_a : row.wins_b)++;
      if (v.presented_order == Order::AB) {
        ++row.presented_ab;
        if (a_won) ++row.a_wins_when_ab;
      } else {
        ++row.presented_ba;
        if (a_won) ++row.a_wins_when_ba;
      }
      if (a_won == (v.presented_order == Order::AB)) ++row.first_presented_wins;
    }
    if (row.total == 0) continue;
    const double n = static_cast<double>(row.total);
    row.pct_a = 100.0 * static_cast<double>(row.wins_a) / n;
    row.pct_b = 100.0 * static_cast<double>(row.wins_b) / n;
    row.first_presented_rate = static_cast<double>(row.first_presented_wins) / n;
    row.positional_skew = std::fabs(2.0 * row.first_presented_rate - 1.0);
    row.bias_flagged = row.positional_skew >= kPositionalSkewFlag;
    s.rows.push_back(row);
  }
  return s;
}

json to_json(const JudgeSummary& s) {
  json rows = json::array();
  for (const auto& r : s.rows) {
    rows.push_back({{"dimension", to_string(r.dimension)},
                    {"total", r.total},
                    {"wins_a", r.wins_a},
                    {"wins_b", r.wins_b},
                    {"pct_a", r.pct_a},
                    {"pct_b", r.pct_b},
                    {"presented_ab", r.presented_ab},
                    {"presented_ba", r.presented_ba},
                    {"a_wins_when_ab", r.a_wins_when_ab},
                    {"a_wins_when_ba", r.a_wins_when_ba},
                    {"first_presented_wins", r.first_presented_wins},
                    {"first_presented_rate", r.first_presented_rate},
                    {"positional_skew", r.positional_skew},
                    {"bias_flagged", r.bias_flagged}});
  }
  return {{"rows", rows}};
}

std::string to_csv(const JudgeSummary& s) {
  std::ostringstream os;
  os << "dimension,total,wins_a,wins_b,pct_a,pct_b,presented_ab,presented_ba,first_presented_wins,positional_skew,"
        "bias_flagged\n";
  for (const auto& r : s.rows) {
    os << to_string(r.dimension) << ',' << r.total << ',' << r.wins_a << ',' << r.wins_b << ',' << pct(r.pct_a)
       << ',' << pct(r.pct_b) << ',' << r.presented_ab << ',' << r.presented_ba << ',' << r.first_presented_wins
       << ',' << pct(r.positional_skew) << ',' << (r.bias_flagged ? "yes" : "no") << '\n';
  }
  return os.str();
}

std::map<std::string, Answer> load_answers(const std::filesystem::path& journal) {
  std::map<std::string, Answer> out;
  for (const auto& j : read_jsonl(journal).records) {
    const auto kind = j.value("kind", "");
    try {
      if (kind == "audit") {
        auto r = audit::audit_record_from_json(j);
        if (!r.ok() || r.completion->final.empty()) continue;
        out.insert_or_assign(r.prompt_id, Answer{r.prompt_sent, r.completion->final, r.source});
      } else if (kind == "jailbreak") {
        auto o = jailbreak::bypass_outcome_from_json(j);
        if (o.error || !o.completion || o.completion->final.empty()) continue;
        std::optional<std::string> source;
        if (j.contains("source") && j.at("source").is_string()) source = j.at("source").get<std::string>();
        out.insert_or_assign(o.prompt_id, Answer{o.question, o.completion->final, source});
      }
    } catch (const std::exception&) {
    }
  }
  return out;
}

std::vector<std::string> sample_per_source(const std::map<std::string, Answer>& answers, size_t per_source,
                                           uint64_t seed) {
  std::map<std::string, std::vector<std::string>> by_source;
  for (const auto& [id, a] : answers) by_source[a.source.value_or("(none)")].push_back(id);
  std::vector<std::string> out;
  for (auto& [src, ids] : by_source) {
    SeededRng rng(splitmix64(seed ^ fnv1a64(src)));
    rng.shuffle(ids);
    if (ids.size() > per_source) ids.resize(per_source);
    out.insert(out.end(), ids.begin(), ids.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

ComparisonRun compare_answers(gateway::Gateway& gw, const std::map<std::string, Answer>& a,
                              const std::map<std::string, Answer>& b,
                              const std::map<std::string, Answer>* reference, Dimension dimension,
                              const gateway::ModelSpec& judge, const std::vector<std::string>& ids,
                              const CompareOptions& opts, size_t concurrency) {
  std::vector<std::string> todo;
  for (const auto& id : ids) {
    if (!a.count(id) || !b.count(id)) continue;
    if (dimension == Dimension::alignment && (!reference || !reference->count(id))) continue;
    todo.push_back(id);
  }
  std::vector<std::optional<JudgeVerdict>> verdicts(todo.size());
  std::vector<std::string> errors(todo.size());
  bounded_for_each(todo.size(), concurrency, [&](size_t i) {
    const auto& id = todo[i];
    const auto& qa = a.at(id);
    CompareOptions per = opts;
    per.seed = splitmix64(opts.seed ^ fnv1a64(id));
    try {
      auto v = dimension == Dimension::factuality
                   ? compare_factuality(gw, qa.question, qa.answer, b.at(id).answer, judge, per)
                   : compare_alignment(gw, qa.question, qa.answer, b.at(id).answer, reference->at(id).answer, judge, per);
      v.prompt_id = id;
      verdicts[i] = std::move(v);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  ComparisonRun run;
  for (size_t i = 0; i < todo.size(); ++i) {
    if (verdicts[i]) run.verdicts.push_back(std::move(*verdicts[i]));
    else run.failures.emplace_back(todo[i], errors[i]);
  }
  return run;
}

}  // namespace censaudit::judge_eval
