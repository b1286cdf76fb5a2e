#pragma once

#include <map>
#include <string>
#include <string_view>

namespace censaudit::assets {

namespace detail {
const std::map<std::string, std::string_view>& table();
}

// Returns the embedded asset at `relative_path` (e.g. "prompts/translation.system.txt").
// Throws std::out_of_range for unknown names.
std::string_view get(std::string_view relative_path);

// Prompt template text with the single trailing newline added by editors removed.
std::string prompt(std::string_view name);

// Replaces every "{key}" occurrence with its value. Unknown placeholders are left as-is.
std::string fill(std::string_view tmpl, const std::map<std::string, std::string>& values);

}  // namespace censaudit::assets
