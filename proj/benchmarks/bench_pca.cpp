#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "support/fixtures.hpp"
#include "uvapm/model.hpp"
#include "uvapm/pca.hpp"

namespace {

void BM_SnapshotPCA(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    const int n = 50;
    std::mt19937 rng(1);
    std::normal_distribution<double> dist;
    Eigen::MatrixXd samples(dim, n);
    for (Eigen::Index i = 0; i < samples.size(); ++i) samples.data()[i] = dist(rng);

    for (auto _ : state) {
        auto result = uvapm::snapshot_pca(samples, 16);
        benchmark::DoNotOptimize(result.basis.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SnapshotPCA)->Arg(64 * 64)->Arg(128 * 128);

void BM_BuildUVAPM(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    auto images = fixtures::procedural_dataset(24, d, 2);
    for (auto _ : state) {
        auto model = uvapm::build_uvapm(images, 16);
        benchmark::DoNotOptimize(model.channels[0].basis.data());
    }
}
BENCHMARK(BM_BuildUVAPM)->Arg(32)->Arg(64);

} // namespace

BENCHMARK_MAIN();
