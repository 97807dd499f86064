#pragma once

namespace transferlm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace transferlm
