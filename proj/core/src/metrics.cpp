#include "sarfusion/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "sarfusion/errors.hpp"

namespace sarfusion {

namespace {

void check_same(const Plane& a, const Plane& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("bands differ in size");
  if (a.size() == 0) throw DimensionError("empty band");
}

std::optional<double> try_cc(const Plane& fused, const Plane& reference) {
  try {
    return correlation_coefficient(fused, reference);
  } catch (const DegenerateInput&) {
    return std::nullopt;
  }
}

std::optional<double> mean_of(const std::array<std::optional<double>, 3>& v) {
  double sum = 0.0;
  for (const auto& x : v) {
    if (!x) return std::nullopt;
    sum += *x;
  }
  return sum / 3.0;
}

}  // namespace

double spectral_distortion(const Plane& fused, const Plane& reference, double scale) {
  check_same(fused, reference);
  return scale * (fused - reference).cwiseAbs().sum() / static_cast<double>(fused.size());
}

double correlation_coefficient(const Plane& fused, const Plane& reference) {
  check_same(fused, reference);
  if (fused.maxCoeff() == fused.minCoeff() || reference.maxCoeff() == reference.minCoeff()) {
    throw DegenerateInput("correlation undefined for a constant band");
  }
  const auto f = (fused.array() - fused.mean()).eval();
  const auto r = (reference.array() - reference.mean()).eval();
  const double cc = (f * r).sum() / std::sqrt(f.square().sum() * r.square().sum());
  return std::clamp(cc, -1.0, 1.0);
}

MseValue mse(const Plane& fused, const Plane& reference, double scale) {
  check_same(fused, reference);
  const double m =
      (scale * (fused - reference)).squaredNorm() / static_cast<double>(fused.size());
  return {m, std::sqrt(m)};
}

MetricsReport metrics_report(const MultiBandImage& fused, const MultiBandImage& ms,
                             const MultiBandImage& sar, double scale) {
  if (fused.bands() != 3 || ms.bands() != 3) throw BandCountError("fused and MS images need 3 bands");
  if (sar.bands() != 1) throw BandCountError("SAR image needs 1 band");
  if (!fused.same_extent(ms) || !fused.same_extent(sar)) throw DimensionError("images differ in size");

  MetricsReport rep;
  rep.scale = scale;
  for (int b = 0; b < 3; ++b) {
    const auto i = static_cast<std::size_t>(b);
    rep.distortion[i] = spectral_distortion(fused.band(b), ms.band(b), scale);
    const auto e = mse(fused.band(b), ms.band(b), scale);
    rep.mse[i] = e.mse;
    rep.rmse[i] = e.rmse;
    rep.cc_ms[i] = try_cc(fused.band(b), ms.band(b));
    rep.cc_sar[i] = try_cc(fused.band(b), sar.band(0));
  }
  rep.distortion_overall = (rep.distortion[0] + rep.distortion[1] + rep.distortion[2]) / 3.0;
  rep.mse_overall = (rep.mse[0] + rep.mse[1] + rep.mse[2]) / 3.0;
  rep.rmse_overall = (rep.rmse[0] + rep.rmse[1] + rep.rmse[2]) / 3.0;
  rep.cc_ms_mean = mean_of(rep.cc_ms);
  rep.cc_sar_mean = mean_of(rep.cc_sar);
  if (rep.cc_ms_mean && rep.cc_sar_mean) rep.cc_overall = 0.5 * (*rep.cc_ms_mean + *rep.cc_sar_mean);
  return rep;
}

}  // namespace sarfusion
