#pragma once

namespace meanrev {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace meanrev
