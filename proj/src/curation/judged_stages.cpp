#include "censaudit/assets.hpp"
#include "censaudit/curation/stages.hpp"
#include "censaudit/parallel.hpp"
#include "censaudit/text.hpp"

#include <spdlog/spdlog.h>

#include <stdexcept>

namespace censaudit::curation {

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::china_related: return "china_related";
    case Criterion::english_language: return "english_language";
    case Criterion::is_question: return "is_question";
    case Criterion::is_clear: return "is_clear";
  }
  return "china_related";
}

Criterion criterion_from_string(std::string_view s) {
  if (s == "china_related") return Criterion::china_related;
  if (s == "english_language" || s == "language") return Criterion::english_language;
  if (s == "is_question" || s == "question") return Criterion::is_question;
  if (s == "is_clear" || s == "clarity") return Criterion::is_clear;
  throw std::invalid_argument("unknown judged criterion: " + std::string(s));
}

std::optional<bool> parse_yes_no(std::string_view reply) {
  auto t = text::fold(text::trim(reply));
  size_t i = 0;
  while (i < t.size() && (t[i] == '"' || t[i] == '\'' || t[i] == '*' || t[i] == '`')) ++i;
  auto word_at = [&](std::string_view w) {
    if (t.compare(i, w.size(), w) != 0) return false;
    size_t end = i + w.size();
    return end == t.size() || !std::isalnum(static_cast<unsigned char>(t[end]));
  };
  if (word_at("yes") || word_at("true")) return true;
  if (word_at("no") || word_at("false")) return false;
  return std::nullopt;
}

gateway::ChatPrompt criterion_prompt(Criterion c, std::string_view t) {
  return gateway::ChatPrompt{assets::prompt("judged_" + std::string(to_string(c)) + ".system"),
                             "Text: " + std::string(t)};
}

std::vector<AskOutcome> ask_with_reask(gateway::Gateway& gw, const gateway::ModelSpec& model,
                                       const std::vector<gateway::ChatPrompt>& prompts,
                                       const gateway::GenerationParams& params,
                                       const std::function<bool(std::string_view)>& conforms,
                                       const std::string& reminder, const JudgeCallOptions& opts) {
  std::vector<AskOutcome> out(prompts.size());
  bounded_for_each(prompts.size(), opts.concurrency, [&](size_t i) {
    auto prompt = prompts[i];
    std::string last;
    for (int ask = 0; ask < std::max(1, opts.max_asks); ++ask) {
      if (ask > 0) prompt.user += "\n\n" + reminder;
      try {
        last = gw.complete(model, prompt, params).text;
      } catch (const gateway::GatewayError& e) {
        out[i].failure = std::string(gateway::to_string(e.kind())) + " error: " + e.what();
        return;
      }
      if (conforms(last)) {
        out[i].reply = last;
        return;
      }
    }
    out[i].failure = "non-conforming reply: " + last.substr(0, 200);
  });
  return out;
}

namespace {

gateway::GenerationParams judge_params(const gateway::ModelSpec& judge) {
  if (judge.role != gateway::Role::judge) {
    throw gateway::ConfigurationError("model '" + judge.id + "' is not a judge");
  }
  auto p = judge.default_params;
  p.temperature = 0.0;
  return p;
}

}  // namespace

StageResult judged_filter(gateway::Gateway& gw, const std::vector<Prompt>& prompts, Criterion criterion,
                          const gateway::ModelSpec& judge, const JudgeCallOptions& opts) {
  const auto params = judge_params(judge);
  std::vector<gateway::ChatPrompt> asks;
  asks.reserve(prompts.size());
  for (const auto& p : prompts) asks.push_back(criterion_prompt(criterion, p.text));
  auto outcomes = ask_with_reask(
      gw, judge, asks, params, [](std::string_view r) { return parse_yes_no(r).has_value(); },
      "Answer with only \"yes\" or \"no\".", opts);

  StageResult r;
  for (size_t i = 0; i < prompts.size(); ++i) {
    if (!outcomes[i].reply) {
      r.needs_review.push_back({prompts[i], outcomes[i].failure});
      continue;
    }
    if (*parse_yes_no(*outcomes[i].reply)) r.prompts.push_back(prompts[i]);
  }
  r.report = make_report(std::string(to_string(criterion)), prompts, r.prompts);
  for (const auto& item : r.needs_review) r.report.needs_review_ids.push_back(item.prompt.id);
  return r;
}

std::optional<std::string> match_category(std::string_view reply, const std::vector<std::string>& names) {
  auto t = std::string(text::trim(reply));
  auto strip = [&] {
    bool changed = true;
    while (changed && !t.empty()) {
      changed = false;
      auto front = t.front();
      auto back = t.back();
      if (front == '"' || front == '\'' || front == '`' || front == '*' || front == '-') {
        t.erase(0, 1);
        changed = true;
      }
      if (!t.empty() && (back == '"' || back == '\'' || back == '`' || back == '*' || back == '.')) {
        t.pop_back();
        changed = true;
      }
      auto trimmed = std::string(text::trim(t));
      if (trimmed.size() != t.size()) {
        t = trimmed;
        changed = true;
      }
    }
  };
  strip();
  if (text::starts_with_icase(t, "category:")) {
    t = std::string(text::trim(std::string_view(t).substr(9)));
    strip();
  }
  const auto folded = text::fold(t);
  for (const auto& n : names) {
    if (text::fold(n) == folded) return n;
  }
  return std::nullopt;
}

StageResult categorize(gateway::Gateway& gw, const std::vector<Prompt>& prompts,
                       const CategorySet& categories, const gateway::ModelSpec& judge,
                       const CategorizeOptions& opts) {
  categories.validate();
  const auto params = judge_params(judge);
  const auto names = categories.names();
  std::string listing;
  for (const auto& n : names) listing += "- " + n + "\n";
  if (!listing.empty()) listing.pop_back();

  std::vector<size_t> todo;
  std::vector<gateway::ChatPrompt> asks;
  for (size_t i = 0; i < prompts.size(); ++i) {
    if (prompts[i].category && !opts.recategorize) continue;
    todo.push_back(i);
    asks.push_back({assets::prompt("categorize.system"),
                    assets::fill(assets::prompt("categorize.user"),
                                 {{"categories", listing}, {"text", prompts[i].text}})});
  }
  auto outcomes = ask_with_reask(
      gw, judge, asks, params,
      [&](std::string_view r) { return match_category(r, names).has_value(); },
      "Reply with exactly one category name from the list and nothing else.", opts.calls);

  StageResult r;
  r.prompts = prompts;
  for (size_t k = 0; k < todo.size(); ++k) {
    auto& p = r.prompts[todo[k]];
    if (outcomes[k].reply) {
      p.category = *match_category(*outcomes[k].reply, names);
    } else {
      p.category.reset();
      r.needs_review.push_back({p, "uncategorized: " + outcomes[k].failure});
    }
  }
  r.report = make_report("categorize", prompts, r.prompts);
  for (const auto& item : r.needs_review) r.report.needs_review_ids.push_back(item.prompt.id);
  return r;
}

}  // namespace censaudit::curation
