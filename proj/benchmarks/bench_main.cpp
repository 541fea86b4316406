#include <benchmark/benchmark.h>

#include <random>

#include "hypermoment/assembly.hpp"
#include "hypermoment/hermite.hpp"
#include "hypermoment/spectral.hpp"
#include "hypermoment/solver.hpp"

using namespace hypermoment;

namespace {

MomentState perturbed_state(int dim, int max_order) {
  Eigen::MatrixXd theta = Eigen::MatrixXd::Identity(dim, dim);
  for (int i = 0; i + 1 < dim; ++i) theta(i, i + 1) = theta(i + 1, i) = 0.2;
  MomentState s = gaussian_state(dim, max_order, 1.1, Eigen::VectorXd::Constant(dim, 0.1), theta);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-0.02, 0.02);
  for (std::size_t r = s.indices().order_begin(3); r < s.size(); ++r) s.w()(static_cast<long>(r)) = uni(rng);
  return s;
}

void BM_AssembleRegularized(benchmark::State& st) {
  const MomentState s = perturbed_state(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(assemble_regularized(s, 0).a.data());
  st.counters["size"] = static_cast<double>(s.size());
}
BENCHMARK(BM_AssembleRegularized)->Args({1, 6})->Args({2, 6})->Args({3, 4})->Args({3, 6});

void BM_ClosedFormSpectrum(benchmark::State& st) {
  const MomentState s = perturbed_state(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(spectrum_regularized(s).data());
}
BENCHMARK(BM_ClosedFormSpectrum)->Args({2, 6})->Args({3, 4});

// Closed-form eigenvalues against a general-purpose eigensolver on the same matrix.
void BM_NumericSpectrum(benchmark::State& st) {
  const MomentState s = perturbed_state(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const Eigen::MatrixXd a = assemble_regularized(s, 0).a;
  for (auto _ : st) benchmark::DoNotOptimize(numeric_spectrum(a).max_imag);
}
BENCHMARK(BM_NumericSpectrum)->Args({2, 6})->Args({3, 4});

void BM_FullEigendecomposition(benchmark::State& st) {
  const MomentState s = perturbed_state(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(full_eigendecomposition(s).residual);
}
BENCHMARK(BM_FullEigendecomposition)->Args({1, 6})->Args({2, 5})->Args({3, 4})->Unit(benchmark::kMicrosecond);

void BM_HermiteRoots(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(hermite_roots(static_cast<int>(st.range(0))).data());
}
BENCHMARK(BM_HermiteRoots)->Arg(8)->Arg(64)->Arg(200);

void BM_SolverStep(benchmark::State& st) {
  SimulationConfig cfg;
  cfg.max_order = static_cast<int>(st.range(0));
  cfg.grid.nx = 400;
  cfg.spectral_check = false;
  const MomentState left = equilibrium(1, cfg.max_order, 2.0, Eigen::VectorXd::Zero(1), 1.0);
  const MomentState right = equilibrium(1, cfg.max_order, 1.0, Eigen::VectorXd::Zero(1), 1.0);
  const std::vector<MomentState> cells = riemann_initial_data(cfg, left, right);
  const double dt = stable_time_step(cells, cfg);
  for (auto _ : st) benchmark::DoNotOptimize(step(cells, dt, cfg).size());
  st.counters["cells/s"] = benchmark::Counter(400.0, benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_SolverStep)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
