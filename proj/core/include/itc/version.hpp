#pragma once

namespace itc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace itc
