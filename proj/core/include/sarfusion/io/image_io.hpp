#pragma once

#include <filesystem>

#include "sarfusion/image.hpp"

namespace sarfusion::io {

/// Reads an 8/16-bit grayscale or 3-channel PNG/TIFF; channels come back in
/// RGB order, scaled by 1 / (2^depth - 1).
MultiBandImage load_image(const std::filesystem::path& path);

/// Writes at `depth` bits (8 or 16). The container follows the extension
/// (.png, .tif, .tiff). The file is written to a temporary and renamed.
void save_image(const MultiBandImage& image, const std::filesystem::path& path, int depth);

/// Rounds every intensity to the nearest level representable at `depth`,
/// exactly as a save/load round trip would.
MultiBandImage quantize(const MultiBandImage& image, int depth);

}  // namespace sarfusion::io
