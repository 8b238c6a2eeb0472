#pragma once

namespace fbqos {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fbqos
