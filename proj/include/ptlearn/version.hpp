#pragma once

namespace ptlearn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ptlearn
