#pragma once

#include <array>
#include <optional>

#include "sarfusion/image.hpp"

namespace sarfusion {

/// Values are reported on the 0-255 scale; inputs are on [0, 1].
inline constexpr double kReportScale = 255.0;

struct MseValue {
  double mse = 0.0;
  double rmse = 0.0;
};

/// Mean absolute difference, scaled.
double spectral_distortion(const Plane& fused, const Plane& reference, double scale = kReportScale);

/// Pearson correlation. Throws DegenerateInput when either band is constant.
double correlation_coefficient(const Plane& fused, const Plane& reference);

/// Mean squared difference (and its root), scaled.
MseValue mse(const Plane& fused, const Plane& reference, double scale = kReportScale);

/// Per-band and overall quality figures of a fused image against the
/// multispectral reference (and the SAR band for correlation). An undefined
/// correlation (constant band) is stored as nullopt and propagates to the
/// averages that include it.
struct MetricsReport {
  std::array<double, 3> distortion{};
  std::array<std::optional<double>, 3> cc_ms{};
  std::array<std::optional<double>, 3> cc_sar{};
  std::array<double, 3> mse{};
  std::array<double, 3> rmse{};

  double distortion_overall = 0.0;
  std::optional<double> cc_ms_mean;
  std::optional<double> cc_sar_mean;
  std::optional<double> cc_overall;
  double mse_overall = 0.0;
  double rmse_overall = 0.0;
  double scale = kReportScale;
};

MetricsReport metrics_report(const MultiBandImage& fused, const MultiBandImage& ms,
                             const MultiBandImage& sar, double scale = kReportScale);

}  // namespace sarfusion
