#pragma once

#include <cstddef>

#include "sarfusion/image.hpp"

namespace sarfusion {

struct BroveyConfig {
  /// Lower bound on the band sum before division ([0, 1] intensity scale).
  double epsilon = 1e-6;
};

struct BroveyResult {
  MultiBandImage image;
  std::size_t clipped_samples = 0;  // band values clipped to 1
  std::size_t dark_pixels = 0;      // band sum below epsilon, output set to 0
};

/// Ratio transform: band_i = ms_i * sar / sum(ms). Pixels whose band sum is
/// below epsilon become black; products above 1 are clipped.
BroveyResult brovey_fuse(const MultiBandImage& ms, const MultiBandImage& sar,
                         const BroveyConfig& cfg = {});

}  // namespace sarfusion
