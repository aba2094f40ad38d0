#pragma once

namespace eef1 {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace eef1
