#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace testsum {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// First 8 digest bytes as a big-endian unsigned integer.
uint64_t sha256_prefix64(std::string_view data);

}  // namespace testsum
