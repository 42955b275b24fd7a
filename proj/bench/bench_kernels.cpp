// Parallel kernels against their serial references on the small CNN's layer
// shapes.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "edda/kernels.hpp"

namespace {

using edda::kernels::ConvGeometry;

std::vector<double> random_values(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

ConvGeometry geometry(const benchmark::State& state) {
  return ConvGeometry{static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
                      static_cast<int>(state.range(2)), static_cast<int>(state.range(2)), 3, 1};
}

template <bool kParallel>
void BM_ConvForward(benchmark::State& state) {
  const ConvGeometry g = geometry(state);
  const auto in = random_values(g.in_size(), 1);
  const auto w = random_values(g.weight_size(), 2);
  const auto b = random_values(g.out_channels, 3);
  std::vector<double> out(g.out_size());
  for (auto _ : state) {
    if constexpr (kParallel) edda::kernels::conv2d_forward(g, in, w, b, out);
    else edda::kernels::reference::conv2d_forward(g, in, w, b, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool kParallel>
void BM_ConvBackward(benchmark::State& state) {
  const ConvGeometry g = geometry(state);
  const auto in = random_values(g.in_size(), 1);
  const auto w = random_values(g.weight_size(), 2);
  const auto go = random_values(g.out_size(), 4);
  std::vector<double> gi(g.in_size()), gw(g.weight_size()), gb(g.out_channels);
  for (auto _ : state) {
    if constexpr (kParallel) {
      edda::kernels::conv2d_backward_input(g, go, w, gi);
      edda::kernels::conv2d_backward_params(g, go, in, gw, gb);
    } else {
      edda::kernels::reference::conv2d_backward_input(g, go, w, gi);
      edda::kernels::reference::conv2d_backward_params(g, go, in, gw, gb);
    }
    benchmark::DoNotOptimize(gi.data());
    benchmark::DoNotOptimize(gw.data());
  }
}

template <bool kParallel>
void BM_Linear(benchmark::State& state) {
  const int n_in = static_cast<int>(state.range(0));
  const int n_out = static_cast<int>(state.range(1));
  const auto in = random_values(n_in, 1);
  const auto w = random_values(static_cast<std::size_t>(n_in) * n_out, 2);
  const auto b = random_values(n_out, 3);
  std::vector<double> out(n_out);
  for (auto _ : state) {
    if constexpr (kParallel) edda::kernels::linear_forward(n_in, n_out, in, w, b, out);
    else edda::kernels::reference::linear_forward(n_in, n_out, in, w, b, out);
    benchmark::DoNotOptimize(out.data());
  }
}

// {in_channels, out_channels, size}: the three conv blocks on 32x32 input.
void conv_args(benchmark::internal::Benchmark* b) {
  b->Args({3, 8, 32})->Args({8, 16, 16})->Args({16, 16, 8});
}

BENCHMARK(BM_ConvForward<true>)->Name("conv_forward/parallel")->Apply(conv_args);
BENCHMARK(BM_ConvForward<false>)->Name("conv_forward/reference")->Apply(conv_args);
BENCHMARK(BM_ConvBackward<true>)->Name("conv_backward/parallel")->Apply(conv_args);
BENCHMARK(BM_ConvBackward<false>)->Name("conv_backward/reference")->Apply(conv_args);
BENCHMARK(BM_Linear<true>)->Name("linear/parallel")->Args({16, 3})->Args({512, 256});
BENCHMARK(BM_Linear<false>)->Name("linear/reference")->Args({16, 3})->Args({512, 256});

}  // namespace

BENCHMARK_MAIN();
