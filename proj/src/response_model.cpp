#include "censaudit/response_model.hpp"

#include "censaudit/text.hpp"

namespace censaudit {

bool Completion::reasoning_absent_or_empty() const {
  return !reasoning || text::trim(*reasoning).empty();
}

namespace {

void split_final(Completion& c, std::string_view after_close) {
  auto final = text::trim_left(after_close);
  c.gap = std::string(after_close.substr(0, after_close.size() - final.size()));
  c.final = std::string(final);
}

}  // namespace

Completion parse_completion(std::string_view raw, const Delimiters& delims) {
  if (delims.open.empty() || delims.close.empty()) {
    throw std::invalid_argument("reasoning delimiters must be non-empty");
  }
  Completion c;
  c.raw = std::string(raw);

  const auto open_pos = raw.find(delims.open);
  const auto close_pos = raw.find(delims.close);

  if (open_pos != std::string_view::npos &&
      (close_pos == std::string_view::npos || close_pos > open_pos)) {
    const auto body_start = open_pos + delims.open.size();
    const auto close_after = raw.find(delims.close, body_start);
    if (close_after == std::string_view::npos) throw MalformedCompletionError(c.raw);
    c.open_present = true;
    c.leading = std::string(raw.substr(0, open_pos));
    c.reasoning = std::string(raw.substr(body_start, close_after - body_start));
    split_final(c, raw.substr(close_after + delims.close.size()));
    return c;
  }

  if (close_pos != std::string_view::npos) {
    c.reasoning = std::string(raw.substr(0, close_pos));
    split_final(c, raw.substr(close_pos + delims.close.size()));
    return c;
  }

  c.final = c.raw;
  return c;
}

std::string reconstruct(const Completion& c, const Delimiters& delims) {
  if (!c.reasoning) return c.final;
  std::string out = c.leading;
  if (c.open_present) out += delims.open;
  out += *c.reasoning;
  out += delims.close;
  out += c.gap;
  out += c.final;
  return out;
}

bool has_substantive_reasoning(const Completion& c, size_t min_chars) {
  if (!c.reasoning) return false;
  return text::visible_length(*c.reasoning) >= min_chars;
}

}  // namespace censaudit
