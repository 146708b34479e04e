// Serial reference loops against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "krepair/batch.hpp"
#include "krepair/demos.hpp"
#include "krepair/rng.hpp"

using namespace krepair;

namespace {

batch::Exec exec_of(const benchmark::State& state)
{
    return state.range(0) ? batch::Exec::Parallel : batch::Exec::Serial;
}

std::vector<Rational> sample_points(std::size_t count, std::uint64_t seed)
{
    Rng rng = make_stream(seed, 0);
    std::vector<Rational> out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(uniform_unit(rng));
    return out;
}

void BM_ColorSubsets(benchmark::State& state)
{
    const auto kernel = block_metric_kernel();
    const auto partition = epsilon_partition(kernel.space(), 0.1);
    const auto elements = sample_points(static_cast<std::size_t>(state.range(1)), 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(batch::color_subsets(kernel, elements, partition, exec_of(state)));
    state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_ColorSubsets)->ArgsProduct({{0, 1}, {32, 96}})->Unit(benchmark::kMillisecond);

void BM_ClassifyTuples(benchmark::State& state)
{
    const auto kernel = bipartite_graphon(true);
    const auto xs = sample_points(40, 2);
    std::vector<Point> tuples;
    for (const auto& a : xs)
        for (const auto& b : xs)
            tuples.push_back({a, b});
    for (auto _ : state)
        benchmark::DoNotOptimize(batch::classify_tuples(kernel, tuples, 0.1, 64, exec_of(state)));
    state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_ClassifyTuples)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Audit(benchmark::State& state)
{
    const auto kernel = bipartite_graphon(true);
    ConstraintSet constraint(2, IndexMode::Distinct);
    constraint.add_symmetry().add_triangle_free();
    const auto atoms = restrict(constraint, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(batch::audit_violations(kernel, atoms, 3, 10'000, 3, exec_of(state)));
    state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_Audit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CompleteGraphSweep(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(batch::complete_graph_sweep(6, 3, exec_of(state)));
    state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_CompleteGraphSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
