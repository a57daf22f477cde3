#pragma once

namespace palign {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace palign
