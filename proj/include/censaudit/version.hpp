#pragma once

namespace censaudit {
inline constexpr const char* kVersion = "0.1.0";
}
