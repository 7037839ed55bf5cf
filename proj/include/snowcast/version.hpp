#pragma once

namespace snowcast {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace snowcast
