#pragma once

namespace otdf {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kCountFileFormatVersion = 1;

}  // namespace otdf
