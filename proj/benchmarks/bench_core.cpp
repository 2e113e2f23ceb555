#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "pinchlab/comparison.hpp"
#include "pinchlab/model_metrics.hpp"
#include "pinchlab/solver.hpp"
#include "pinchlab/tensor_core.hpp"
#include "pinchlab/uniformization.hpp"

using namespace pinchlab;

static void BM_CurvatureOfWarped(benchmark::State& st) {
  WarpedMetric g = drilling_interpolation(6.0, CutoffProfile(), 2.5, 9.0, 1.0 / static_cast<double>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(curvature_of_warped(g).sup_sec_deviation(-1.0));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(g.grid.n));
}
BENCHMARK(BM_CurvatureOfWarped)->Arg(100)->Arg(1000);

static void BM_EinsteinOperatorPerturbed(benchmark::State& st) {
  WarpedMetric g = drilling_interpolation(6.0, CutoffProfile(), 2.5, 9.0, 1e-3);
  SymRadialTensor h = SymRadialTensor::zeros(g.grid);
  for (auto _ : st) benchmark::DoNotOptimize(einstein_operator_perturbed(g, h).sup_norm());
}
BENCHMARK(BM_EinsteinOperatorPerturbed);

static void BM_LinearizedInverseFactorize(benchmark::State& st) {
  WarpedMetric g = hyperbolic_cusp(0.0, 10.0, 1.0 / static_cast<double>(st.range(0)));
  for (auto _ : st) {
    LinearizedInverse inv(g);
    benchmark::DoNotOptimize(&inv);
  }
}
BENCHMARK(BM_LinearizedInverseFactorize)->Arg(100)->Arg(1000);

static void BM_BanachDrilling(benchmark::State& st) {
  const double R = static_cast<double>(st.range(0));
  WarpedMetric g = drilling_interpolation(R, CutoffProfile(), R - 3.5, R + 3.0, 1e-3);
  for (auto _ : st) benchmark::DoNotOptimize(banach_iterate(g).final_residual);
}
BENCHMARK(BM_BanachDrilling)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_HybridNorms(benchmark::State& st) {
  WarpedMetric g = hyperbolic_cusp(0.0, 8.0, 1e-2);
  SymRadialTensor h = SymRadialTensor::from_function(g.grid, [](double r) { return Mat3(std::exp(-r) * Mat3::Identity()); });
  for (auto _ : st) benchmark::DoNotOptimize(hybrid_norms(h, g, NormConfig{}).hybrid_2);
}
BENCHMARK(BM_HybridNorms)->Unit(benchmark::kMillisecond);

static void BM_RecoverRho(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const double p = 2.0 * std::numbers::pi;
  TorusGrid rho = TorusGrid::from_function(Lattice2D{}, n, n, [&](const Eigen::Vector2d& x) {
    return 0.05 * std::sin(p * x(0)) * std::cos(p * x(1));
  });
  TorusGrid K = gauss_curvature(rho).K;
  for (auto _ : st) benchmark::DoNotOptimize(recover_rho(K).residual);
}
BENCHMARK(BM_RecoverRho)->Arg(32)->Arg(128);

static void BM_JacobiSolve(benchmark::State& st) {
  auto R = [](double t) { return Eigen::MatrixXd::Constant(1, 1, -1.0 - 1e-3 * std::exp(2.5 * (t - 10.0))); };
  for (auto _ : st)
    benchmark::DoNotOptimize(jacobi_solve(R, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1), 10.0).J.back()(0));
}
BENCHMARK(BM_JacobiSolve);
BENCHMARK_MAIN();
