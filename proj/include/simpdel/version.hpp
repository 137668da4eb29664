#pragma once

namespace simpdel {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace simpdel
