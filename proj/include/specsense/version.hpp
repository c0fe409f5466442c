#pragma once

namespace specsense {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace specsense
