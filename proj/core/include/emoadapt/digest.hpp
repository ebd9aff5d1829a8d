#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace emoadapt {

// Lower-case hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

// CRC-32 (IEEE 802.3, as in zlib/PNG).
std::uint32_t crc32(std::span<const std::uint8_t> bytes);

// 64-bit FNV-1a, used for stable seeds and hash-based splits.
std::uint64_t fnv1a64(std::string_view text);

// Mixes a seed with a stream discriminator.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace emoadapt
