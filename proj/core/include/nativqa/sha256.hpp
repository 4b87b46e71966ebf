#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace nativqa {

// Lowercase 64-hex-char SHA-256 digest of the input bytes.
std::string sha256_hex(std::string_view data);

// First 8 digest bytes as a big-endian uint64, mapped to [0,1).
// The unit-interval hash behind deterministic split assignment.
double sha256_unit_interval(std::string_view data);

}  // namespace nativqa
