#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace censaudit::classifier {

// Phrase lists for the heuristic classifier. Matching is case-insensitive
// substring search after folding typographic quotes.
struct Lexicons {
  std::string version;
  std::vector<std::string> refusal_phrases;
  std::vector<std::string> template_markers;

  // sha256 over version and both lists; recorded in every verdict.
  std::string hash() const;

  static Lexicons from_json(const nlohmann::json& j);
  static Lexicons load(const std::filesystem::path& path);
  static const Lexicons& defaults();
  nlohmann::json to_json() const;
};

std::optional<std::string> first_refusal_match(std::string_view text, const Lexicons& lex);
bool is_refusal(std::string_view text, const Lexicons& lex);

// Distinct template markers present in `text`, in lexicon order.
std::vector<std::string> template_matches(std::string_view text, const Lexicons& lex);

inline constexpr size_t kTemplateMarkerThreshold = 2;

bool is_template_nonanswer(std::string_view text, const Lexicons& lex,
                           size_t threshold = kTemplateMarkerThreshold);

}  // namespace censaudit::classifier
