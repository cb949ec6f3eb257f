#pragma once

namespace sparc {

inline constexpr const char* kVersion = "1.0.0";

} // namespace sparc
