#pragma once

namespace bellgen {

inline constexpr const char* kVersion = "0.1.0";

} // namespace bellgen
