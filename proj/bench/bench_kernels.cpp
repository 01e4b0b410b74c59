// OpenMP kernels against their serial references. Thread count follows
// OMP_NUM_THREADS; times are wall clock.

#include <vector>

#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include "pfdr/dp_sampler.hpp"
#include "pfdr/harness.hpp"
#include "pfdr/kernels.hpp"
#include "pfdr/random.hpp"

using namespace pfdr;

namespace {

// Posterior-like draws taken from the DP prior; the kernels only see
// (pi, G) pairs, so this exercises the same code at a realistic atom count.
const std::vector<PosteriorDraw>& draws() {
  static const std::vector<PosteriorDraw> out = [] {
    std::vector<PosteriorDraw> d;
    const DPConfig config;
    Rng rng(11);
    for (int t = 0; t < 2000; ++t) {
      PosteriorDraw p;
      p.iteration = t;
      p.pi = 0.6 + 0.3 * uniform01(rng);
      p.g_draw = sample_dp_prior(config, rng, 1e-6);
      p.n_clusters = static_cast<int>(p.g_draw.size());
      d.push_back(std::move(p));
    }
    return d;
  }();
  return out;
}

std::vector<double> grid(std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = (i + 1.0) / (n + 1.0);
  return g;
}

template <bool Parallel>
void BM_pfdr_matrix(benchmark::State& state) {
  const auto gammas = grid(50);
  for (auto _ : state) {
    auto m = Parallel ? kernels::pfdr_draw_matrix(draws(), gammas) : kernels::serial::pfdr_draw_matrix(draws(), gammas);
    benchmark::DoNotOptimize(m.values.data());
  }
}

template <bool Parallel>
void BM_posterior_mean_cdf(benchmark::State& state) {
  const auto xs = grid(kSupGridPoints);
  for (auto _ : state) {
    auto v = Parallel ? kernels::posterior_mean_cdf(draws(), xs) : kernels::serial::posterior_mean_cdf(draws(), xs);
    benchmark::DoNotOptimize(v.data());
  }
}

template <bool Parallel>
void BM_model_cdf_grid(benchmark::State& state) {
  const PValueMixture model{0.7, draws()[0].g_draw};
  const auto xs = grid(20000);
  for (auto _ : state) {
    auto v = Parallel ? kernels::model_cdf_grid(model, xs) : kernels::serial::model_cdf_grid(model, xs);
    benchmark::DoNotOptimize(v.data());
  }
}

template <bool Parallel>
void BM_density_curve_t(benchmark::State& state) {
  const TestModel model{TestKind::TLocation, 0.0, Sidedness::TwoSided, 4, 5};
  const auto xs = grid(999);
  for (auto _ : state) {
    auto v = Parallel ? kernels::density_curve(model, 0.8, xs) : kernels::serial::density_curve(model, 0.8, xs);
    benchmark::DoNotOptimize(v.data());
  }
}

template <Execution E>
void BM_sweep_cells(benchmark::State& state) {
  SweepSpec spec;
  spec.m_list = {100, 200};
  spec.replicates = 4;
  ChainSettings settings;
  settings.iterations = 300;
  settings.burn_in = 100;
  for (auto _ : state) {
    auto rows = run_sweep(spec, DPConfig{}, settings, E);
    benchmark::DoNotOptimize(rows.data());
  }
}

} // namespace

BENCHMARK(BM_pfdr_matrix<true>)->Name("pfdr_matrix/parallel")->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pfdr_matrix<false>)->Name("pfdr_matrix/serial")->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_posterior_mean_cdf<true>)->Name("posterior_mean_cdf/parallel")->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_posterior_mean_cdf<false>)->Name("posterior_mean_cdf/serial")->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_model_cdf_grid<true>)->Name("model_cdf_grid/parallel")->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_model_cdf_grid<false>)->Name("model_cdf_grid/serial")->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_density_curve_t<true>)->Name("density_curve_t/parallel")->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_density_curve_t<false>)->Name("density_curve_t/serial")->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_cells<Execution::Parallel>)->Name("sweep_cells/parallel")->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_cells<Execution::Serial>)->Name("sweep_cells/serial")->UseRealTime()->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::err);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
