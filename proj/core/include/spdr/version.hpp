#pragma once

namespace spdr {
inline constexpr const char* version = "0.1.0";
inline constexpr int summary_schema_version = 1;
}  // namespace spdr
