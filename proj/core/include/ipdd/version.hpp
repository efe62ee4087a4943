#pragma once

namespace ipdd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ipdd
