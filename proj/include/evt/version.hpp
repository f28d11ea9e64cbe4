#pragma once

namespace evt {
inline constexpr const char* kVersion = "0.1.0";
}
