#include "censaudit/kernels/kernels.hpp"

#include "censaudit/text.hpp"

#include <set>

namespace censaudit::kernels::serial {

namespace {

std::set<std::string> shingle_set(const std::string& s) {
  auto tokens = text::word_tokens(s);
  std::set<std::string> out;
  if (tokens.empty()) return out;
  if (tokens.size() < 3) {
    std::string whole;
    for (const auto& t : tokens) whole += (whole.empty() ? "" : " ") + t;
    out.insert(whole);
    return out;
  }
  for (size_t i = 0; i + 3 <= tokens.size(); ++i) {
    out.insert(tokens[i] + " " + tokens[i + 1] + " " + tokens[i + 2]);
  }
  return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() || b.empty()) return 0.0;
  size_t inter = 0;
  for (const auto& s : a) inter += b.count(s);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

}  // namespace

std::vector<classifier::CensorshipVerdict> classify_all(std::span<const Completion> completions,
                                                        const classifier::Lexicons& lex,
                                                        const classifier::HeuristicOptions& opts) {
  std::vector<classifier::CensorshipVerdict> out;
  out.reserve(completions.size());
  for (const auto& c : completions) out.push_back(classifier::classify_heuristic("", c, lex, opts));
  return out;
}

std::vector<uint8_t> keyword_mask(std::span<const std::string> texts,
                                  std::span<const std::string> keywords) {
  std::vector<uint8_t> mask(texts.size(), 0);
  for (size_t i = 0; i < texts.size(); ++i) {
    for (const auto& k : keywords) {
      if (text::contains_word(texts[i], k)) {
        mask[i] = 1;
        break;
      }
    }
  }
  return mask;
}

std::vector<size_t> token_counts(std::span<const std::string> texts) {
  std::vector<size_t> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(text::whitespace_token_count(t));
  return out;
}

double shingle_similarity(const std::string& a, const std::string& b) {
  return jaccard(shingle_set(a), shingle_set(b));
}

std::vector<std::vector<size_t>> near_duplicate_predecessors(std::span<const std::string> texts,
                                                             double threshold) {
  std::vector<std::set<std::string>> sets;
  sets.reserve(texts.size());
  for (const auto& t : texts) sets.push_back(shingle_set(t));
  std::vector<std::vector<size_t>> out(texts.size());
  for (size_t i = 0; i < texts.size(); ++i) {
    for (size_t j = 0; j < i; ++j) {
      if (jaccard(sets[i], sets[j]) >= threshold) out[i].push_back(j);
    }
  }
  return out;
}

std::vector<uint8_t> near_duplicate_drop_mask(std::span<const std::string> texts, double threshold) {
  auto preds = near_duplicate_predecessors(texts, threshold);
  std::vector<uint8_t> drop(texts.size(), 0);
  for (size_t i = 0; i < texts.size(); ++i) {
    for (size_t j : preds[i]) {
      if (!drop[j]) {
        drop[i] = 1;
        break;
      }
    }
  }
  return drop;
}

}  // namespace censaudit::kernels::serial
