#pragma once

namespace grail {

inline constexpr const char* kGrailVersion = "0.1.0";

}  // namespace grail
