#pragma once

namespace gasrank {

inline constexpr const char* tool_name = "gasrank";
inline constexpr const char* tool_version = "1.0.0";

}  // namespace gasrank
