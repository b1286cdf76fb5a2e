#include "censaudit/classifier/classifier.hpp"

#include <stdexcept>

namespace censaudit::classifier {

std::string_view to_string(Label l) {
  switch (l) {
    case Label::not_censored: return "NotCensored";
    case Label::type1: return "Type1";
    case Label::type2: return "Type2";
    case Label::type3: return "Type3";
  }
  return "NotCensored";
}

std::string_view to_string(Mode m) { return m == Mode::judge ? "judge" : "heuristic"; }

Label label_from_string(std::string_view s) {
  if (s == "NotCensored") return Label::not_censored;
  if (s == "Type1") return Label::type1;
  if (s == "Type2") return Label::type2;
  if (s == "Type3") return Label::type3;
  throw std::invalid_argument("unknown verdict label: " + std::string(s));
}

Mode mode_from_string(std::string_view s) {
  if (s == "heuristic") return Mode::heuristic;
  if (s == "judge") return Mode::judge;
  throw std::invalid_argument("unknown classifier mode: " + std::string(s));
}

json to_json(const CensorshipVerdict& v) {
  return json{{"label", to_string(v.label)},
              {"mode", to_string(v.mode)},
              {"evidence", v.evidence},
              {"lexicon_hash", v.lexicon_hash}};
}

CensorshipVerdict verdict_from_json(const json& j) {
  CensorshipVerdict v;
  v.label = label_from_string(j.at("label").get<std::string>());
  v.mode = mode_from_string(j.value("mode", std::string("heuristic")));
  v.evidence = j.value("evidence", "");
  v.lexicon_hash = j.value("lexicon_hash", "");
  return v;
}

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

}  // namespace

CensorshipVerdict classify_heuristic(std::string_view /*question*/, const Completion& c,
                                     const Lexicons& lex, const HeuristicOptions& opts) {
  CensorshipVerdict v;
  v.mode = Mode::heuristic;
  v.lexicon_hash = lex.hash();

  const bool substantive = has_substantive_reasoning(c, opts.min_reasoning_chars);
  const auto markers = template_matches(c.final, lex);
  const bool template_like = markers.size() >= opts.template_threshold;
  const auto refusal = first_refusal_match(c.final, lex);

  if (!substantive) {
    if (template_like) {
      v.label = Label::type1;
      v.evidence = "template: " + join(markers);
    } else if (refusal) {
      v.label = Label::type2;
      v.evidence = "refusal: " + *refusal;
    }
  } else if (refusal) {
    v.label = Label::type3;
    v.evidence = "refusal after reasoning: " + *refusal;
  } else if (template_like) {
    v.label = Label::type3;
    v.evidence = "template after reasoning: " + join(markers);
  }
  return v;
}

CensorshipVerdict Classifier::classify_raw(std::string_view question, std::string_view raw) {
  Completion c;
  try {
    c = parse_completion(raw, delims_);
  } catch (const MalformedCompletionError& e) {
    throw ClassificationError(std::string("cannot classify malformed completion: ") + e.what());
  }
  return classify(question, c);
}

}  // namespace censaudit::classifier
