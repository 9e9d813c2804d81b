#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace promptrouter::codec {

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view encoded);

/// Little-endian IEEE-754 binary64 packing used by the advantage DB file.
std::string encode_f64(std::span<const double> values);
std::vector<double> decode_f64(std::string_view encoded);

std::string sha256_hex(std::string_view data);

/// 64-bit FNV-1a. Stable across platforms and runs, unlike std::hash.
std::uint64_t fnv1a64(std::string_view data) noexcept;

}  // namespace promptrouter::codec
