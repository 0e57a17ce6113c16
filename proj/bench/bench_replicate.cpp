// Serial reference kernel against the OpenMP kernel on the same workload,
// plus the impedance table against brute force on one bag.

#include <benchmark/benchmark.h>

#include "epicure/crusade.hpp"
#include "epicure/cure_policy.hpp"
#include "epicure/replicate.hpp"

using namespace epicure;

namespace {

struct Workload {
    Graph graph = make_grid(4, 4);
    ExactCrusadeProvider provider{graph};
    ReplicationSetup setup;

    Workload() {
        setup.graph = &graph;
        setup.policy = PolicyKind::Cure;
        setup.budget = 256.0;
        setup.seed = 1;
        setup.provider = &provider;
        setup.cure = make_cure_config(graph, setup.budget, provider.cutwidth(), false);
    }
};

const Workload& workload() {
    static const Workload w;
    return w;
}

void BM_ReplicationsSerial(benchmark::State& state) {
    const auto count = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_replications_serial(workload().setup, count));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ReplicationsParallel(benchmark::State& state) {
    const auto count = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_replications_parallel(workload().setup, count));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ImpedanceTable(benchmark::State& state) {
    const Graph g = make_grid(3, 3);
    for (auto _ : state) {
        ImpedanceTable table(g);
        benchmark::DoNotOptimize(table.impedance(g.all_nodes()));
    }
}

void BM_ImpedanceBruteForce(benchmark::State& state) {
    const Graph g = make_grid(3, 3);
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_impedance(g, g.all_nodes()));
}

}  // namespace

BENCHMARK(BM_ReplicationsSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicationsParallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ImpedanceTable)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ImpedanceBruteForce)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
