#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sarfusion/cdl.hpp"

namespace sarfusion::io {

/// Binary layout, all integers and floats little-endian:
///   "CDLF" | u32 version | u32 p | u32 A | f64 D_MS[p][A] | f64 D_B[p][A] | u64 checksum
/// Matrices are row-major. The checksum is the byte sum (mod 2^64) of
/// everything that precedes it.
inline constexpr std::uint32_t kDictionaryFormatVersion = 1;

std::vector<unsigned char> encode_dictionary(const CoupledDictionary& dict);
CoupledDictionary decode_dictionary(const std::vector<unsigned char>& bytes);

void save_dictionary(const CoupledDictionary& dict, const std::filesystem::path& path);
CoupledDictionary load_dictionary(const std::filesystem::path& path);

}  // namespace sarfusion::io
