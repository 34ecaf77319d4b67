// Cost of the measure pipeline: the reduced N1 x N1 block against the full
// N x N eigenproblem it replaces, plus the surrounding stages.

#include "polyxtal/linalg.hpp"
#include "polyxtal/polycrystal.hpp"
#include "polyxtal/projection.hpp"
#include "polyxtal/spectral.hpp"

#include <benchmark/benchmark.h>

#include <cstdlib>
#include <map>

using namespace polyxtal;

namespace {

const ProjectionSet& projections_for(int d, int L) {
    static std::map<std::pair<int, int>, ProjectionSet> cache;
    auto it = cache.find({d, L});
    if (it == cache.end())
        it = cache.emplace(std::make_pair(d, L), build_projections(LatticeSpec::make(d, L, L)))
                 .first;
    return it->second;
}

IndicatorMatrices sample_for(int d, int L) {
    return realize_indicators(sample_orientations(LatticeSpec::make(d, L, L), 42, 0));
}

void BM_ReducedBlockBuild(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const int L = static_cast<int>(state.range(1));
    const auto& P = projections_for(d, L);
    const auto ind = sample_for(d, L);
    for (auto _ : state)
        benchmark::DoNotOptimize(reduced_block(ind, P, BlockKind::X1Gamma));
}

void BM_ReducedBlockEig(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const int L = static_cast<int>(state.range(1));
    const auto& P = projections_for(d, L);
    const auto ind = sample_for(d, L);
    const Eigen::MatrixXd block = reduced_block(ind, P, BlockKind::X1Gamma);
    for (auto _ : state)
        benchmark::DoNotOptimize(eig_block(block, BlockKind::X1Gamma));
}

// the path the reduced block replaces: eig of the full X1 Gamma X1
void BM_FullMatrixEig(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const int L = static_cast<int>(state.range(1));
    const auto& P = projections_for(d, L);
    const auto ind = sample_for(d, L);
    const Eigen::MatrixXd x1 = ind.dense_X1();
    const Eigen::MatrixXd full = x1 * P.gamma * x1;
    for (auto _ : state)
        benchmark::DoNotOptimize(eig_sym(full));
}

void BM_MeasurePipeline(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const int L = static_cast<int>(state.range(1));
    const auto& P = projections_for(d, L);
    const LatticeSpec spec = LatticeSpec::make(d, L, L);
    std::uint64_t sample = 0;
    for (auto _ : state) {
        const auto ind = realize_indicators(sample_orientations(spec, 42, sample++));
        const auto eig = eig_block(reduced_block(ind, P, BlockKind::X1Gamma), BlockKind::X1Gamma);
        benchmark::DoNotOptimize(measure_atoms(eig, ind, 1, 1));
    }
}

} // namespace

BENCHMARK(BM_ReducedBlockBuild)->Args({2, 16})->Args({2, 24})->Args({3, 6})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReducedBlockEig)->Args({2, 16})->Args({2, 24})->Args({3, 6})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FullMatrixEig)->Args({2, 16})->Args({2, 24})->Args({3, 6})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MeasurePipeline)->Args({2, 16})->Args({3, 6})->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    setenv("OPENBLAS_NUM_THREADS", "1", 0);
    benchmark::Initialize(&argc, argv);
    benchmark::RunSpecifiedBenchmarks();
    return 0;
}
