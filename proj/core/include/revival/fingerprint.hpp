#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace revival {

inline constexpr std::string_view kToolName = "revival";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// Zero-padded 16-digit lower-case hex.
std::string hex64(std::uint64_t value);

/// Round-trip decimal rendering used in every output file: %.17g, with
/// "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double value);

/// "# revival <version> config=<hex>"; first line of every output file.
std::string provenance_line(std::uint64_t config_hash);

}  // namespace revival
