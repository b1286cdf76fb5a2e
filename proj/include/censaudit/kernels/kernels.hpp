#pragma once

// Data-parallel kernels used by the curation and audit stages. Each kernel has
// an OpenMP implementation (censaudit::kernels) and a straightforward serial
// reference (censaudit::kernels::serial) kept for differential testing and the
// benchmark target. Both must return identical results.

#include "censaudit/classifier/classifier.hpp"
#include "censaudit/response_model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace censaudit::kernels {

inline constexpr double kNearDuplicateThreshold = 0.9;

std::vector<classifier::CensorshipVerdict> classify_all(std::span<const Completion> completions,
                                                        const classifier::Lexicons& lex,
                                                        const classifier::HeuristicOptions& opts = {});

// mask[i] = 1 iff texts[i] contains at least one keyword on word boundaries.
std::vector<uint8_t> keyword_mask(std::span<const std::string> texts,
                                  std::span<const std::string> keywords);

std::vector<size_t> token_counts(std::span<const std::string> texts);

// For each i, the ascending indices j < i whose token 3-shingle Jaccard
// similarity with texts[i] is >= threshold. Texts with fewer than three tokens
// use their whole token sequence as a single shingle; token-less texts match nothing.
std::vector<std::vector<size_t>> near_duplicate_predecessors(std::span<const std::string> texts,
                                                             double threshold = kNearDuplicateThreshold);

// Greedy keep-earliest resolution: i is dropped iff some kept j < i is a near duplicate.
std::vector<uint8_t> near_duplicate_drop_mask(std::span<const std::string> texts,
                                              double threshold = kNearDuplicateThreshold);

namespace serial {

std::vector<classifier::CensorshipVerdict> classify_all(std::span<const Completion> completions,
                                                        const classifier::Lexicons& lex,
                                                        const classifier::HeuristicOptions& opts = {});
std::vector<uint8_t> keyword_mask(std::span<const std::string> texts,
                                  std::span<const std::string> keywords);
std::vector<size_t> token_counts(std::span<const std::string> texts);
std::vector<std::vector<size_t>> near_duplicate_predecessors(std::span<const std::string> texts,
                                                             double threshold = kNearDuplicateThreshold);
std::vector<uint8_t> near_duplicate_drop_mask(std::span<const std::string> texts,
                                              double threshold = kNearDuplicateThreshold);

// Exact shingle-set Jaccard similarity between two texts.
double shingle_similarity(const std::string& a, const std::string& b);

}  // namespace serial

}  // namespace censaudit::kernels
