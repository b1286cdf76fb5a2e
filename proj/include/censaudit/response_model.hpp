#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace censaudit {

struct Delimiters {
  std::string open = "<think>";
  std::string close = "</think>";
};

// A model output split into its reasoning segment and final answer.
//
// For well-formed input:  raw == leading + open + reasoning + close + gap + final
// where `leading` is whatever preceded the open delimiter and `gap` is the
// whitespace trimmed from the front of the final answer. When the output starts
// mid-reasoning (the open delimiter was supplied by the chat template) only the
// close delimiter appears; then open_present is false and leading is empty.
struct Completion {
  std::string raw;
  std::optional<std::string> reasoning;  // absent != empty
  std::string final;
  std::string leading;
  std::string gap;
  bool open_present = false;

  bool reasoning_absent_or_empty() const;
};

class MalformedCompletionError : public std::runtime_error {
 public:
  explicit MalformedCompletionError(std::string raw)
      : std::runtime_error("completion opens a reasoning block that is never closed"),
        raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

// Only the first delimiter pair is honored; later delimiters belong to `final`.
// Throws MalformedCompletionError for an open delimiter with no close after it,
// std::invalid_argument for empty delimiters.
Completion parse_completion(std::string_view raw, const Delimiters& delims = {});

// Inverse of parse_completion for delimited outputs; returns raw otherwise.
std::string reconstruct(const Completion& c, const Delimiters& delims = {});

inline constexpr size_t kDefaultMinReasoningChars = 20;

// True iff reasoning is present and has at least `min_chars` non-whitespace characters.
bool has_substantive_reasoning(const Completion& c, size_t min_chars = kDefaultMinReasoningChars);

}  // namespace censaudit
