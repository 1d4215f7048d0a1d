#pragma once

namespace pclust {

inline constexpr const char* kVersion = "0.1.0";

} // namespace pclust
