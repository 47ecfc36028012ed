#pragma once

namespace locrel {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace locrel
