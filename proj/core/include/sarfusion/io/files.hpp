#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

namespace sarfusion::io {

/// Writes `bytes` to a sibling temporary file, then renames it over `path`.
void write_atomically(const std::filesystem::path& path, std::string_view bytes);
void write_atomically(const std::filesystem::path& path, const std::vector<unsigned char>& bytes);

std::vector<unsigned char> read_file(const std::filesystem::path& path);

}  // namespace sarfusion::io
