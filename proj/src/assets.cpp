#include "censaudit/assets.hpp"

#include <stdexcept>

namespace censaudit::assets {

std::string_view get(std::string_view relative_path) {
  const auto& t = detail::table();
  auto it = t.find(std::string(relative_path));
  if (it == t.end()) {
    throw std::out_of_range("unknown asset: " + std::string(relative_path));
  }
  return it->second;
}

std::string prompt(std::string_view name) {
  std::string text(get("prompts/" + std::string(name) + ".txt"));
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

std::string fill(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto key = std::string(tmpl.substr(i + 1, close - i - 1));
        auto it = values.find(key);
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

}  // namespace censaudit::assets
