#include "censaudit/curation/stages.hpp"

#include "censaudit/kernels/kernels.hpp"
#include "censaudit/text.hpp"

#include <stdexcept>
#include <unordered_set>

namespace censaudit::curation {

namespace {

std::vector<std::string> texts_of(const std::vector<Prompt>& prompts) {
  std::vector<std::string> out;
  out.reserve(prompts.size());
  for (const auto& p : prompts) out.push_back(p.text);
  return out;
}

StageResult keep_by_mask(std::string name, const std::vector<Prompt>& prompts,
                         const std::vector<uint8_t>& keep) {
  StageResult r;
  for (size_t i = 0; i < prompts.size(); ++i) {
    if (keep[i]) r.prompts.push_back(prompts[i]);
  }
  r.report = make_report(std::move(name), prompts, r.prompts);
  return r;
}

bool url_start(std::string_view s, size_t i) {
  if (i > 0 && !text::is_space(s[i - 1]) && s[i - 1] != '(' && s[i - 1] != '<' && s[i - 1] != '"') {
    return false;
  }
  auto rest = s.substr(i);
  return text::starts_with_icase(rest, "http://") || text::starts_with_icase(rest, "https://") ||
         text::starts_with_icase(rest, "www.");
}

}  // namespace

StageResult filter_length(const std::vector<Prompt>& prompts, const LengthBounds& bounds) {
  auto texts = texts_of(prompts);
  auto counts = kernels::token_counts(texts);
  std::vector<uint8_t> keep(prompts.size(), 0);
  for (size_t i = 0; i < prompts.size(); ++i) {
    std::optional<size_t> max;
    if (auto it = bounds.max_tokens_by_source.find(prompts[i].source); it != bounds.max_tokens_by_source.end()) {
      max = it->second;
    }
    keep[i] = counts[i] >= bounds.min_tokens && (!max || counts[i] <= *max);
  }
  return keep_by_mask("length", prompts, keep);
}

StageResult filter_keywords(const std::vector<Prompt>& prompts, const std::vector<std::string>& keywords) {
  if (keywords.empty()) throw std::invalid_argument("keyword list is empty");
  auto texts = texts_of(prompts);
  return keep_by_mask("keywords", prompts, kernels::keyword_mask(texts, keywords));
}

std::string remove_urls(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    if (url_start(s, i)) {
      // A ')' with no '(' inside the URL closes surrounding text, not the URL.
      int depth = 0;
      while (i < s.size() && !text::is_space(s[i])) {
        if (s[i] == '(') ++depth;
        else if (s[i] == ')' && depth-- == 0) break;
        ++i;
      }
      continue;
    }
    out += s[i++];
  }
  return out;
}

StageResult strip_links(const std::vector<Prompt>& prompts) {
  StageResult r;
  for (const auto& p : prompts) {
    auto stripped = remove_urls(p.text);
    if (stripped.size() == p.text.size()) {
      r.prompts.push_back(p);
      continue;
    }
    auto cleaned = text::normalize_whitespace(stripped);
    if (cleaned.empty()) continue;
    Prompt q = p;
    q.text = std::move(cleaned);
    r.prompts.push_back(std::move(q));
  }
  r.report = make_report("links", prompts, r.prompts);
  return r;
}

StageResult dedup(const std::vector<Prompt>& prompts, double threshold) {
  std::vector<Prompt> unique;
  std::unordered_set<std::string> seen;
  for (const auto& p : prompts) {
    if (seen.insert(p.id).second) unique.push_back(p);
  }
  auto texts = texts_of(unique);
  auto drop = kernels::near_duplicate_drop_mask(texts, threshold);
  StageResult r;
  for (size_t i = 0; i < unique.size(); ++i) {
    if (!drop[i]) r.prompts.push_back(unique[i]);
  }
  r.report = make_report("dedup", prompts, r.prompts);
  return r;
}

}  // namespace censaudit::curation
