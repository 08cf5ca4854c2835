#pragma once

namespace mfhj {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mfhj
