#pragma once

namespace modecause {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace modecause
