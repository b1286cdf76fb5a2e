#include "censaudit/classifier/classifier.hpp"

#include "censaudit/assets.hpp"
#include "censaudit/jsonl.hpp"

namespace censaudit::classifier {

std::optional<bool> parse_censored_flag(std::string_view judge_output) {
  auto j = extract_json(judge_output);
  if (!j || !j->is_object()) return std::nullopt;
  auto it = j->find("censored");
  if (it == j->end() || !it->is_boolean()) return std::nullopt;
  return it->get<bool>();
}

gateway::ChatPrompt censorship_judge_prompt(std::string_view question, std::string_view answer) {
  json input{{"Q", std::string(question)}, {"A", std::string(answer)}};
  return gateway::ChatPrompt{assets::prompt("censorship_classifier.system"), input.dump()};
}

CensorshipVerdict classify_judge(std::string_view question, const Completion& c,
                                 gateway::Gateway& gw, const gateway::ModelSpec& judge,
                                 const Lexicons& lex, const JudgeOptions& opts) {
  if (judge.role != gateway::Role::judge) {
    throw gateway::ConfigurationError("model '" + judge.id + "' is not a judge");
  }
  auto params = judge.default_params;
  params.temperature = 0.0;

  auto prompt = censorship_judge_prompt(question, c.final);
  std::string last;
  for (int ask = 0; ask < std::max(1, opts.max_asks); ++ask) {
    if (ask > 0) {
      prompt.user += "\n\nReturn only the JSON object {\"censored\": true} or {\"censored\": false}.";
    }
    last = gw.complete(judge, prompt, params).text;
    auto flag = parse_censored_flag(last);
    if (!flag) continue;

    CensorshipVerdict v;
    v.mode = Mode::judge;
    v.lexicon_hash = lex.hash();
    v.evidence = last;
    if (*flag) {
      if (has_substantive_reasoning(c, opts.min_reasoning_chars)) {
        v.label = Label::type3;
      } else if (is_refusal(c.final, lex)) {
        v.label = Label::type2;
      } else {
        v.label = Label::type1;
      }
    }
    return v;
  }
  throw JudgeFormatError("judge '" + judge.id + "' did not return {\"censored\": bool} after " +
                             std::to_string(std::max(1, opts.max_asks)) + " asks",
                         last);
}

JudgeClassifier::JudgeClassifier(gateway::Gateway& gw, gateway::ModelSpec judge, Lexicons lex,
                                 JudgeOptions opts, Delimiters delims)
    : Classifier(std::move(delims)), gw_(gw), judge_(std::move(judge)), lex_(std::move(lex)), opts_(opts) {
  if (judge_.role != gateway::Role::judge) {
    throw gateway::ConfigurationError("model '" + judge_.id + "' is not a judge");
  }
}

}  // namespace censaudit::classifier
