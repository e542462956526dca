#pragma once

namespace drwps {

inline constexpr const char kVersion[] = "0.1.0";

}  // namespace drwps
