#pragma once

namespace polarlab {

inline constexpr const char *kVersion = "0.1.0";

} // namespace polarlab
