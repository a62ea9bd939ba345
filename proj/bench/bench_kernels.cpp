// Serial reference vs OpenMP path for the hot kernels.  Arg 0 runs the
// serial path, arg 1 the parallel one; set HOPJAM_THREADS to pick the
// thread count.

#include <benchmark/benchmark.h>

#include <cstdlib>
#include <numbers>
#include <random>
#include <vector>

#include "hopjam/dataset.hpp"
#include "hopjam/exec.hpp"
#include "hopjam/layers.hpp"
#include "hopjam/siamese.hpp"
#include "hopjam/tfa.hpp"

using namespace hopjam;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

std::vector<double> uniform(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// 40 ms at the 1 MHz analysis rate: hopping-like tone pair plus noise.
sigsynth::ComplexSignal analysis_signal() {
  const std::size_t n = 40000;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 0.3);
  std::vector<sigsynth::cd> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * 1e-6;
    v[i] = std::polar(1.0, 2 * std::numbers::pi * 120e3 * t) + std::polar(0.5, 2 * std::numbers::pi * 80e3 * t) +
           sigsynth::cd(g(rng), g(rng));
  }
  return sigsynth::ComplexSignal(sigsynth::SamplingGrid{1e6, 0.04, n}, v);
}

void BM_Conv2dForward(benchmark::State& state) {
  const layers::Shape3 in{3, 48, 48};
  const std::size_t oc = 16, k = 4;
  const auto x = uniform(in.c * in.h * in.w, 1);
  const auto w = uniform(oc * in.c * k * k, 2);
  const auto b = uniform(oc, 3);
  const auto os = layers::conv_output_shape(in, oc, k);
  std::vector<double> out(os.c * os.h * os.w);
  for (auto _ : state) {
    layers::conv2d_forward(x, in, w, b, oc, k, out, exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Conv2dForward)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_Conv2dBackward(benchmark::State& state) {
  const layers::Shape3 in{16, 22, 22};
  const std::size_t oc = 32, k = 3;
  const auto x = uniform(in.c * in.h * in.w, 1);
  const auto w = uniform(oc * in.c * k * k, 2);
  const auto os = layers::conv_output_shape(in, oc, k);
  const auto d_out = uniform(os.c * os.h * os.w, 3);
  std::vector<double> dk(w.size()), db(oc), dx(x.size());
  for (auto _ : state) {
    layers::conv2d_backward(x, in, w, oc, k, d_out, dk, db, dx, exec_of(state));
    benchmark::DoNotOptimize(dx.data());
  }
}
BENCHMARK(BM_Conv2dBackward)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_Transform(benchmark::State& state, tfa::TransformKind kind) {
  static const auto x = analysis_signal();
  tfa::TfGridSpec g;
  for (auto _ : state) {
    auto sp = tfa::transform(kind, x, g, exec_of(state));
    benchmark::DoNotOptimize(sp.values.data());
  }
}
BENCHMARK_CAPTURE(BM_Transform, wavelet, tfa::TransformKind::Wavelet)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Transform, mhd, tfa::TransformKind::MHD)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Transform, bjd, tfa::TransformKind::BJD)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PairGradient(benchmark::State& state) {
  const auto arch = siamese::Architecture::desk();
  const auto params = siamese::init_parameters(arch, {}, 1);
  const std::size_t n = 3 * arch.input_side * arch.input_side;
  std::vector<std::vector<double>> imgs;
  for (unsigned i = 0; i < 8; ++i) imgs.push_back(uniform(n, 10 + i));
  std::vector<siamese::PairRef> batch;
  for (std::size_t i = 0; i + 1 < imgs.size(); i += 2) batch.push_back({imgs[i], imgs[i + 1], i % 4 == 0});
  auto grads = siamese::ModelParameters::zeros(arch);
  for (auto _ : state) {
    benchmark::DoNotOptimize(siamese::loss_and_gradient(params, batch, grads, exec_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.size()));
}
BENCHMARK(BM_PairGradient)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("HOPJAM_THREADS")) set_thread_count(std::atoi(env));
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
