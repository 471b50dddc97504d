#include "sarfusion/brovey.hpp"

#include <array>

#include "sarfusion/errors.hpp"

namespace sarfusion {

BroveyResult brovey_fuse(const MultiBandImage& ms, const MultiBandImage& sar,
                         const BroveyConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw InvalidArgument("brovey epsilon must be > 0");
  if (ms.bands() != 3) throw BandCountError("multispectral image must have 3 bands");
  if (sar.bands() != 1) throw BandCountError("SAR image must have 1 band");
  if (!ms.same_extent(sar)) throw DimensionError("multispectral and SAR sizes differ");

  const int h = ms.height();
  const int w = ms.width();
  std::array<Plane, 3> out;
  for (auto& p : out) p.resize(h, w);

  BroveyResult result;
  const Plane& intensity = sar.band(0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double theta = ms.band(0)(r, c) + ms.band(1)(r, c) + ms.band(2)(r, c);
      if (theta < cfg.epsilon) {
        ++result.dark_pixels;
        for (auto& p : out) p(r, c) = 0.0;
        continue;
      }
      const double gain = intensity(r, c) / theta;
      for (int b = 0; b < 3; ++b) {
        double v = ms.band(b)(r, c) * gain;
        if (v > 1.0) {
          v = 1.0;
          ++result.clipped_samples;
        }
        out[static_cast<std::size_t>(b)](r, c) = v;
      }
    }
  }
  result.image = MultiBandImage({out[0], out[1], out[2]}, ms.bit_depth_origin());
  return result;
}

}  // namespace sarfusion
