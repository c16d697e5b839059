#pragma once

namespace tdtw {

inline constexpr const char* kVersion = "0.1.0";

} // namespace tdtw
