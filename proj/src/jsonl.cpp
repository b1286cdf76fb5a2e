#include "censaudit/jsonl.hpp"

#include <stdexcept>

namespace censaudit {

JsonlReadResult read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  JsonlReadResult result;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++result.total_lines;
    auto parsed = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded() || !parsed.is_object()) {
      ++result.skipped_lines;
      continue;
    }
    result.records.push_back(std::move(parsed));
  }
  return result;
}

std::string dump_compact(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::optional<json> extract_json(std::string_view text) {
  auto try_parse = [](std::string_view s) -> std::optional<json> {
    auto j = json::parse(s.begin(), s.end(), nullptr, false);
    if (j.is_discarded() || !(j.is_object() || j.is_array())) return std::nullopt;
    return j;
  };
  if (auto j = try_parse(text)) return j;
  if (auto fence = text.find("```"); fence != std::string_view::npos) {
    auto body_start = text.find('\n', fence);
    auto fence_end = body_start == std::string_view::npos ? body_start : text.find("```", body_start);
    if (fence_end != std::string_view::npos) {
      if (auto j = try_parse(text.substr(body_start + 1, fence_end - body_start - 1))) return j;
    }
  }
  for (auto [open, close] : {std::pair{'{', '}'}, std::pair{'[', ']'}}) {
    auto first = text.find(open);
    auto last = text.rfind(close);
    if (first != std::string_view::npos && last != std::string_view::npos && last > first) {
      if (auto j = try_parse(text.substr(first, last - first + 1))) return j;
    }
  }
  return std::nullopt;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : records) out << dump_compact(r) << '\n';
}

JsonlAppender::JsonlAppender(const std::filesystem::path& path) : path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::app);
  if (!out_) throw std::runtime_error("cannot append to " + path.string());
}

void JsonlAppender::append(const json& record) {
  auto line = dump_compact(record);
  std::lock_guard lock(mu_);
  out_ << line << '\n';
  out_.flush();
}

}  // namespace censaudit
