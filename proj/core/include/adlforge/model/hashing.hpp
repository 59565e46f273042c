#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace adlforge {

std::string sha256_hex(std::string_view bytes);
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_file(const std::filesystem::path& path);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::string base64_encode(std::string_view bytes);

/// Derives an independent seed for item `index` of a run. Stable across
/// platforms and independent of processing order.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

/// 64-bit FNV-1a, for cheap deterministic mixing of strings into seeds.
std::uint64_t fnv1a64(std::string_view s);

}  // namespace adlforge
