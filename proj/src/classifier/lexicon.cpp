#include "censaudit/classifier/lexicon.hpp"

#include "censaudit/assets.hpp"
#include "censaudit/hashing.hpp"
#include "censaudit/text.hpp"

#include <fstream>
#include <stdexcept>

namespace censaudit::classifier {

using nlohmann::json;

std::string Lexicons::hash() const { return sha256_hex(to_json().dump()); }

Lexicons Lexicons::from_json(const json& j) {
  Lexicons lex;
  lex.version = j.value("version", std::string("unversioned"));
  for (const auto& p : j.value("refusal_phrases", json::array()))
    lex.refusal_phrases.push_back(text::fold(p.get<std::string>()));
  for (const auto& p : j.value("template_markers", json::array()))
    lex.template_markers.push_back(text::fold(p.get<std::string>()));
  if (lex.refusal_phrases.empty() || lex.template_markers.empty()) {
    throw std::invalid_argument("lexicon needs non-empty refusal_phrases and template_markers");
  }
  return lex;
}

Lexicons Lexicons::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("lexicon file not found: " + path.string());
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw std::runtime_error("lexicon file is not JSON: " + path.string());
  return from_json(j);
}

const Lexicons& Lexicons::defaults() {
  static const Lexicons kDefaults = from_json(json::parse(assets::get("lexicon.json")));
  return kDefaults;
}

json Lexicons::to_json() const {
  return json{{"version", version},
              {"refusal_phrases", refusal_phrases},
              {"template_markers", template_markers}};
}

std::optional<std::string> first_refusal_match(std::string_view text, const Lexicons& lex) {
  const auto folded = text::fold(text);
  for (const auto& p : lex.refusal_phrases) {
    if (!p.empty() && folded.find(p) != std::string::npos) return p;
  }
  return std::nullopt;
}

bool is_refusal(std::string_view text, const Lexicons& lex) {
  return first_refusal_match(text, lex).has_value();
}

std::vector<std::string> template_matches(std::string_view text, const Lexicons& lex) {
  const auto folded = text::fold(text);
  std::vector<std::string> out;
  for (const auto& m : lex.template_markers) {
    if (!m.empty() && folded.find(m) != std::string::npos) out.push_back(m);
  }
  return out;
}

bool is_template_nonanswer(std::string_view text, const Lexicons& lex, size_t threshold) {
  return template_matches(text, lex).size() >= threshold;
}

}  // namespace censaudit::classifier
