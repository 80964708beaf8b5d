#pragma once

namespace rird {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rird
