#pragma once

#include "censaudit/classifier/lexicon.hpp"
#include "censaudit/gateway/gateway.hpp"
#include "censaudit/response_model.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace censaudit::classifier {

using json = nlohmann::json;

enum class Label { not_censored, type1, type2, type3 };
enum class Mode { heuristic, judge };

std::string_view to_string(Label l);
std::string_view to_string(Mode m);
Label label_from_string(std::string_view s);
Mode mode_from_string(std::string_view s);

struct CensorshipVerdict {
  Label label = Label::not_censored;
  Mode mode = Mode::heuristic;
  std::string evidence;
  std::string lexicon_hash;

  bool censored() const { return label != Label::not_censored; }
  bool operator==(const CensorshipVerdict&) const = default;
};

json to_json(const CensorshipVerdict& v);
CensorshipVerdict verdict_from_json(const json& j);

class ClassificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Judge output that never conformed to the expected shape.
class JudgeFormatError : public std::runtime_error {
 public:
  JudgeFormatError(const std::string& what, std::string last_output)
      : std::runtime_error(what), last_output_(std::move(last_output)) {}
  const std::string& last_output() const { return last_output_; }

 private:
  std::string last_output_;
};

struct HeuristicOptions {
  size_t min_reasoning_chars = kDefaultMinReasoningChars;
  size_t template_threshold = kTemplateMarkerThreshold;
};

// Decision table over a parsed completion:
//   no substantive reasoning, template non-answer  -> Type1
//   no substantive reasoning, explicit refusal     -> Type2
//   substantive reasoning, refusal or template     -> Type3
//   otherwise                                      -> NotCensored
CensorshipVerdict classify_heuristic(std::string_view question, const Completion& c,
                                     const Lexicons& lex, const HeuristicOptions& opts = {});

struct JudgeOptions {
  // Total asks including the first; each re-ask appends a format reminder.
  int max_asks = 2;
  size_t min_reasoning_chars = kDefaultMinReasoningChars;
};

// Parses {"censored": true|false}; nullopt for anything else.
std::optional<bool> parse_censored_flag(std::string_view judge_output);

// Sends the JSON-only censorship classifier prompt with {Q, A=final} at
// temperature 0 and maps censored=true onto Type1/Type2/Type3 using reasoning
// presence and the refusal lexicon. Throws JudgeFormatError.
CensorshipVerdict classify_judge(std::string_view question, const Completion& c,
                                 gateway::Gateway& gw, const gateway::ModelSpec& judge,
                                 const Lexicons& lex = Lexicons::defaults(),
                                 const JudgeOptions& opts = {});

gateway::ChatPrompt censorship_judge_prompt(std::string_view question, std::string_view answer);

class Classifier {
 public:
  explicit Classifier(Delimiters delims = {}) : delims_(std::move(delims)) {}
  virtual ~Classifier() = default;

  virtual CensorshipVerdict classify(std::string_view question, const Completion& c) = 0;
  virtual Mode mode() const = 0;

  // Parses with this classifier's delimiters first. Malformed output raises
  // ClassificationError rather than being guessed at.
  CensorshipVerdict classify_raw(std::string_view question, std::string_view raw);
  const Delimiters& delimiters() const { return delims_; }

 private:
  Delimiters delims_;
};

class HeuristicClassifier : public Classifier {
 public:
  explicit HeuristicClassifier(Lexicons lex = Lexicons::defaults(), HeuristicOptions opts = {},
                               Delimiters delims = {})
      : Classifier(std::move(delims)), lex_(std::move(lex)), opts_(opts) {}

  CensorshipVerdict classify(std::string_view question, const Completion& c) override {
    return classify_heuristic(question, c, lex_, opts_);
  }
  Mode mode() const override { return Mode::heuristic; }
  const Lexicons& lexicons() const { return lex_; }
  const HeuristicOptions& options() const { return opts_; }

 private:
  Lexicons lex_;
  HeuristicOptions opts_;
};

class JudgeClassifier : public Classifier {
 public:
  JudgeClassifier(gateway::Gateway& gw, gateway::ModelSpec judge,
                  Lexicons lex = Lexicons::defaults(), JudgeOptions opts = {}, Delimiters delims = {});

  CensorshipVerdict classify(std::string_view question, const Completion& c) override {
    return classify_judge(question, c, gw_, judge_, lex_, opts_);
  }
  Mode mode() const override { return Mode::judge; }

 private:
  gateway::Gateway& gw_;
  gateway::ModelSpec judge_;
  Lexicons lex_;
  JudgeOptions opts_;
};

}  // namespace censaudit::classifier
