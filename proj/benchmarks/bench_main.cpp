#include <benchmark/benchmark.h>

#include "rrf/atoms.hpp"
#include "rrf/dataset.hpp"
#include "rrf/features.hpp"
#include "rrf/kernels.hpp"
#include "rrf/random_feature_model.hpp"

using namespace rrf;

namespace {

FeatureBank make_bank(FeatureKind kind, int n) {
    FeatureSpec spec;
    spec.kind = kind;
    spec.input_dim = 2;
    spec.count = n;
    spec.seed = 3;
    if (kind == FeatureKind::fourier) spec.distribution = Gaussian{};
    return FeatureBank::sample(spec);
}

void BM_Features(benchmark::State& state, FeatureKind kind) {
    const Dataset data = gen_grid2d(Grid2dKind::sine, 2000, 1);
    const FeatureBank bank = make_bank(kind, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(compute_features(data.x, bank));
    state.SetItemsProcessed(state.iterations() * 2000 * state.range(0));
}
BENCHMARK_CAPTURE(BM_Features, relu, FeatureKind::relu)->Arg(100)->Arg(1000);
BENCHMARK_CAPTURE(BM_Features, fourier, FeatureKind::fourier)->Arg(100)->Arg(1000);

void BM_ArcCosGram(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Matrix pts = sample_sphere(4, n, 2);
    const ArcCosKernel k(4);
    for (auto _ : state) benchmark::DoNotOptimize(k.gram(pts));
}
BENCHMARK(BM_ArcCosGram)->Arg(200)->Arg(1000);

void BM_MonteCarloKernel(benchmark::State& state) {
    const Matrix omegas = sample_sphere(4, static_cast<int>(state.range(0)), 4);
    const Matrix pts = sample_sphere(4, 2, 5);
    const Vector x = pts.row(0).transpose(), y = pts.row(1).transpose();
    for (auto _ : state) benchmark::DoNotOptimize(mc_kernel_estimate_sphere(x, y, omegas));
}
BENCHMARK(BM_MonteCarloKernel)->Arg(10000)->Arg(100000);

void BM_Sparsify(benchmark::State& state) {
    std::vector<Atom> atoms;
    const Matrix dirs = sample_sphere(2, 100, 6);
    for (int j = 0; j < 100; ++j) atoms.push_back({j % 2 ? 0.1 : -0.1, dirs.row(j).transpose()});
    const AtomicFunction f(2, std::move(atoms));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(maurey_sparsify(f, static_cast<int>(state.range(0)), ++seed));
}
BENCHMARK(BM_Sparsify)->Arg(100)->Arg(1600);

void BM_TrainEpoch(benchmark::State& state, FeatureKind kind) {
    const Dataset data = gen_grid2d(Grid2dKind::sine, 2000, 1);
    const FeatureBank bank = make_bank(kind, static_cast<int>(state.range(0)));
    const FeatureMatrix phi = compute_features(data.x, bank);
    TrainConfig cfg;
    cfg.epochs = 1;
    for (auto _ : state) benchmark::DoNotOptimize(train_on_features(bank, phi, data, LossKind::hinge, cfg));
}
BENCHMARK_CAPTURE(BM_TrainEpoch, relu, FeatureKind::relu)->Arg(320);
BENCHMARK_CAPTURE(BM_TrainEpoch, fourier, FeatureKind::fourier)->Arg(320);

}  // namespace

BENCHMARK_MAIN();
