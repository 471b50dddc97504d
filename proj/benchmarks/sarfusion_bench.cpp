#include <random>

#include <benchmark/benchmark.h>

#include "sarfusion/cdl.hpp"
#include "sarfusion/image.hpp"
#include "sarfusion/sparse.hpp"

namespace {

using namespace sarfusion;

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

Eigen::MatrixXd unit_columns(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Eigen::MatrixXd d = random_matrix(rows, cols, seed);
  d.colwise().normalize();
  return d;
}

void BM_Omp(benchmark::State& state) {
  const auto atoms = state.range(0);
  const Eigen::MatrixXd d = unit_columns(384, atoms, 1);
  const Eigen::VectorXd x = random_matrix(384, 1, 2).col(0);
  for (auto _ : state) benchmark::DoNotOptimize(omp(d, x, {4, 1e-8}));
}
BENCHMARK(BM_Omp)->Arg(64)->Arg(256)->Arg(1024);

void BM_JointCode(benchmark::State& state) {
  const auto q = state.range(0);
  const Eigen::MatrixXd dms = unit_columns(192, 256, 3), db = unit_columns(192, 256, 4);
  const Eigen::MatrixXd xms = random_matrix(192, q, 5), xb = random_matrix(192, q, 6);
  for (auto _ : state) benchmark::DoNotOptimize(joint_code(dms, db, xms, xb, {4, 1e-8}));
  state.SetComplexityN(q);
}
BENCHMARK(BM_JointCode)->RangeMultiplier(2)->Range(128, 2048)->Complexity(benchmark::oN)->Unit(benchmark::kMillisecond);

void BM_ExtractPatches(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto image = MultiBandImage::filled(3, side, side, 0.5);
  const auto grid = build_patch_grid(side, side, 8, 4);
  for (auto _ : state) benchmark::DoNotOptimize(center_patches(extract_patches(image, grid)));
}
BENCHMARK(BM_ExtractPatches)->Arg(128)->Arg(512);

void BM_TrainRound(benchmark::State& state) {
  const Eigen::MatrixXd xms = random_matrix(192, 961, 7), xb = random_matrix(192, 961, 8);
  TrainConfig cfg;
  cfg.rounds = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train(xms, xb, cfg));
}
BENCHMARK(BM_TrainRound)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
