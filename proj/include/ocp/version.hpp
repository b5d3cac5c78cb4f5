#pragma once

namespace ocp {
inline constexpr const char* kVersion = "1.0.0";
}
