#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sarfusion/errors.hpp"
#include "sarfusion/metrics.hpp"

namespace sarfusion {
namespace {

using testing::random_plane;
using testing::rng_for;

// relative for magnitudes above 1
void expect_close(double got, double want, double tol) {
  EXPECT_LE(std::abs(got - want), tol * std::max(1.0, std::abs(want))) << got << " vs " << want;
}

TEST(Distortion, Cases) {
  auto& rng = rng_for(1);
  const Plane a = random_plane(rng, 5, 6);
  EXPECT_EQ(spectral_distortion(a, a), 0.0);
  const Plane base = random_plane(rng, 5, 6, 0.0, 0.9);
  EXPECT_NEAR(spectral_distortion((base.array() + 10.0 / 255.0).matrix(), base), 10.0, 1e-12);
  const Plane x = random_plane(rng, 4, 4), y = random_plane(rng, 4, 4);
  expect_close(spectral_distortion(x, y), testing::oracle_distortion(x, y), 1e-12);
  EXPECT_EQ(spectral_distortion(x, y), spectral_distortion(y, x));
  EXPECT_THROW(spectral_distortion(x, Plane::Zero(4, 5)), DimensionError);
}

TEST(Correlation, Cases) {
  auto& rng = rng_for(2);
  const Plane a = random_plane(rng, 8, 8);
  EXPECT_NEAR(correlation_coefficient(a, a), 1.0, 1e-15);
  EXPECT_NEAR(correlation_coefficient((1.0 - a.array()).matrix(), a), -1.0, 1e-15);
  const Plane b = random_plane(rng, 8, 8);
  EXPECT_NEAR(correlation_coefficient(a, b), testing::oracle_pearson(a, b), 1e-12);
  EXPECT_NEAR(correlation_coefficient(255.0 * a, b), correlation_coefficient(a, b), 1e-14);
  EXPECT_EQ(correlation_coefficient(a, b), correlation_coefficient(b, a));
  EXPECT_THROW(correlation_coefficient(Plane::Constant(8, 8, 0.3), a), DegenerateInput);
  EXPECT_THROW(correlation_coefficient(a, Plane::Constant(8, 8, 0.3)), DegenerateInput);
}

TEST(Mse, Cases) {
  auto& rng = rng_for(3);
  const Plane a = random_plane(rng, 6, 6, 0.0, 0.9);
  const auto zero = mse(a, a);
  EXPECT_EQ(zero.mse, 0.0);
  EXPECT_EQ(zero.rmse, 0.0);
  const auto three = mse((a.array() + 3.0 / 255.0).matrix(), a);
  EXPECT_NEAR(three.mse, 9.0, 1e-11);
  EXPECT_NEAR(three.rmse, 3.0, 1e-12);
  const Plane b = random_plane(rng, 6, 6);
  expect_close(mse(a, b).mse, testing::oracle_mse(a, b), 1e-12);
  EXPECT_EQ(mse(a, b).mse, mse(b, a).mse);
}

TEST(Metrics, OracleSweep) {
  auto& rng = rng_for(4);
  for (int t = 0; t < 100; ++t) {
    const int h = 2 + static_cast<int>(rng() % 15), w = 2 + static_cast<int>(rng() % 15);
    const Plane a = random_plane(rng, h, w), b = random_plane(rng, h, w);
    expect_close(spectral_distortion(a, b), testing::oracle_distortion(a, b), 1e-12);
    expect_close(mse(a, b).mse, testing::oracle_mse(a, b), 1e-12);
    expect_close(mse(a, b).rmse, std::sqrt(testing::oracle_mse(a, b)), 1e-12);
    EXPECT_NEAR(correlation_coefficient(a, b), testing::oracle_pearson(a, b), 1e-12);
  }
}

TEST(MetricsReport, IdentityAndSar) {
  auto& rng = rng_for(5);
  const auto ms = testing::random_image(rng, 3, 9, 9);
  const auto sar = testing::random_image(rng, 1, 9, 9);
  const auto same = metrics_report(ms, ms, sar);
  EXPECT_EQ(same.distortion_overall, 0.0);
  EXPECT_EQ(same.mse_overall, 0.0);
  ASSERT_TRUE(same.cc_ms_mean.has_value());
  EXPECT_NEAR(*same.cc_ms_mean, 1.0, 1e-15);

  const MultiBandImage broadcast({sar.band(0), sar.band(0), sar.band(0)});
  const auto r = metrics_report(broadcast, ms, sar);
  ASSERT_TRUE(r.cc_sar_mean.has_value());
  EXPECT_NEAR(*r.cc_sar_mean, 1.0, 1e-15);
}

TEST(MetricsReport, MatchesPerOpOracles) {
  auto& rng = rng_for(6);
  const auto f = testing::random_image(rng, 3, 7, 11);
  const auto ms = testing::random_image(rng, 3, 7, 11);
  const auto sar = testing::random_image(rng, 1, 7, 11);
  const auto r = metrics_report(f, ms, sar);
  double d = 0.0, m = 0.0, rm = 0.0, cms = 0.0, csar = 0.0;
  for (int b = 0; b < 3; ++b) {
    const auto ub = static_cast<std::size_t>(b);
    expect_close(r.distortion[ub], testing::oracle_distortion(f.band(b), ms.band(b)), 1e-12);
    expect_close(r.mse[ub], testing::oracle_mse(f.band(b), ms.band(b)), 1e-12);
    EXPECT_NEAR(*r.cc_ms[ub], testing::oracle_pearson(f.band(b), ms.band(b)), 1e-12);
    EXPECT_NEAR(*r.cc_sar[ub], testing::oracle_pearson(f.band(b), sar.band(0)), 1e-12);
    d += r.distortion[ub];
    m += r.mse[ub];
    rm += r.rmse[ub];
    cms += *r.cc_ms[ub];
    csar += *r.cc_sar[ub];
  }
  EXPECT_NEAR(r.distortion_overall, d / 3, 1e-12);
  EXPECT_NEAR(r.mse_overall, m / 3, 1e-10);
  EXPECT_NEAR(r.rmse_overall, rm / 3, 1e-12);
  EXPECT_NEAR(*r.cc_ms_mean, cms / 3, 1e-14);
  EXPECT_NEAR(*r.cc_sar_mean, csar / 3, 1e-14);
  EXPECT_NEAR(*r.cc_overall, (cms / 3 + csar / 3) / 2, 1e-14);
}

TEST(MetricsReport, ConstantBandIsUndefined) {
  auto& rng = rng_for(7);
  const auto ms = testing::random_image(rng, 3, 5, 5);
  const MultiBandImage f({ms.band(0), Plane::Constant(5, 5, 0.5), ms.band(2)});
  const auto r = metrics_report(f, ms, testing::random_image(rng, 1, 5, 5));
  EXPECT_FALSE(r.cc_ms[1].has_value());
  EXPECT_FALSE(r.cc_ms_mean.has_value());
  EXPECT_FALSE(r.cc_overall.has_value());
  EXPECT_TRUE(r.cc_ms[0].has_value());
}

}  // namespace
}  // namespace sarfusion
