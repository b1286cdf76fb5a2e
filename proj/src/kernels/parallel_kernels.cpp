#include "censaudit/kernels/kernels.hpp"

#include "censaudit/rng.hpp"
#include "censaudit/text.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdint>
#include <unordered_map>

namespace censaudit::kernels {

namespace {

// Sorted, unique 64-bit shingle hashes.
std::vector<uint64_t> hashed_shingles(const std::string& s) {
  auto tokens = text::word_tokens(s);
  std::vector<uint64_t> out;
  if (tokens.empty()) return out;
  auto h = [](std::initializer_list<const std::string*> parts) {
    uint64_t acc = 0xcbf29ce484222325ULL;
    bool first = true;
    for (const auto* p : parts) {
      if (!first) acc = fnv1a64(" ", acc);
      acc = fnv1a64(*p, acc);
      first = false;
    }
    return splitmix64(acc);
  };
  if (tokens.size() < 3) {
    if (tokens.size() == 1) out.push_back(h({&tokens[0]}));
    else out.push_back(h({&tokens[0], &tokens[1]}));
  } else {
    out.reserve(tokens.size() - 2);
    for (size_t i = 0; i + 3 <= tokens.size(); ++i) out.push_back(h({&tokens[i], &tokens[i + 1], &tokens[i + 2]}));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<classifier::CensorshipVerdict> classify_all(std::span<const Completion> completions,
                                                        const classifier::Lexicons& lex,
                                                        const classifier::HeuristicOptions& opts) {
  std::vector<classifier::CensorshipVerdict> out(completions.size());
  const auto n = static_cast<int64_t>(completions.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (int64_t i = 0; i < n; ++i) {
    out[i] = classifier::classify_heuristic("", completions[i], lex, opts);
  }
  return out;
}

std::vector<uint8_t> keyword_mask(std::span<const std::string> texts,
                                  std::span<const std::string> keywords) {
  std::vector<uint8_t> mask(texts.size(), 0);
  const auto n = static_cast<int64_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (int64_t i = 0; i < n; ++i) {
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
  std::vector<size_t> out(texts.size());
  const auto n = static_cast<int64_t>(texts.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) out[i] = text::whitespace_token_count(texts[i]);
  return out;
}

std::vector<std::vector<size_t>> near_duplicate_predecessors(std::span<const std::string> texts,
                                                             double threshold) {
  const auto n = static_cast<int64_t>(texts.size());
  std::vector<std::vector<uint64_t>> sets(texts.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (int64_t i = 0; i < n; ++i) sets[i] = hashed_shingles(texts[i]);

  // Inverted index: shingle -> ascending document ids.
  std::unordered_map<uint64_t, std::vector<uint32_t>> index;
  for (size_t i = 0; i < sets.size(); ++i) {
    for (auto s : sets[i]) index[s].push_back(static_cast<uint32_t>(i));
  }

  std::vector<std::vector<size_t>> out(texts.size());
#pragma omp parallel
  {
    std::unordered_map<uint32_t, uint32_t> shared;
#pragma omp for schedule(dynamic, 32)
    for (int64_t i = 0; i < n; ++i) {
      const auto& mine = sets[i];
      if (mine.empty()) continue;
      shared.clear();
      for (auto s : mine) {
        const auto& docs = index.at(s);
        for (auto j : docs) {
          if (j >= i) break;
          ++shared[j];
        }
      }
      for (const auto& [j, inter] : shared) {
        const double uni = static_cast<double>(mine.size() + sets[j].size() - inter);
        if (inter / uni >= threshold) out[i].push_back(j);
      }
      std::sort(out[i].begin(), out[i].end());
    }
  }
  return out;
}

std::vector<uint8_t> near_duplicate_drop_mask(std::span<const std::string> texts, double threshold) {
  auto preds = near_duplicate_predecessors(texts, threshold);
  std::vector<uint8_t> drop(texts.size(), 0);
  // The greedy sweep is order-dependent and stays sequential.
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

}  // namespace censaudit::kernels
