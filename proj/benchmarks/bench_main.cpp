#include <benchmark/benchmark.h>

#include "dtdob/design.hpp"
#include "dtdob/sim.hpp"

using namespace dtdob;

namespace {

const BenchmarkConfig kCfg;

DobDesign proposed_design() { return kCfg.design(QFilter{{0.24, 1.0, 3.0, 3.0}, {0.24}}, DiscretizationMethod::FDM); }

void BM_Roots(benchmark::State& state) {
    std::vector<cplx> r;
    for (int k = 0; k < state.range(0); ++k) r.emplace_back(0.9 * std::cos(k), 0.0);
    const Polynomial p = Polynomial::from_roots(r);
    for (auto _ : state) benchmark::DoNotOptimize(roots(p));
}
BENCHMARK(BM_Roots)->Arg(4)->Arg(10)->Arg(20);

void BM_Schur(benchmark::State& state) {
    const Polynomial p = characteristic_polynomial(proposed_design(), kCfg.member());
    for (auto _ : state) benchmark::DoNotOptimize(is_schur_shifted(p));
}
BENCHMARK(BM_Schur);

void BM_Zoh(benchmark::State& state) {
    const RationalTransfer p = kCfg.member();
    for (auto _ : state) benchmark::DoNotOptimize(zoh_discretize(p, kCfg.delta));
}
BENCHMARK(BM_Zoh);

void BM_Verdict(benchmark::State& state) {
    const DobDesign d = proposed_design();
    for (auto _ : state) benchmark::DoNotOptimize(theorem1_verdict(d, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Verdict)->Arg(101)->Arg(1001);

void BM_KbarSearch(benchmark::State& state) {
    const Polynomial m = limit_m_star(4, DiscretizationMethod::ZOH);
    for (auto _ : state) benchmark::DoNotOptimize(kbar_search(Polynomial{1.0}, Polynomial::monomial(3), m));
}
BENCHMARK(BM_KbarSearch);

void BM_Simulate(benchmark::State& state) {
    const DobDesign d = proposed_design();
    SimulationOptions opts;
    opts.horizon = static_cast<double>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate(d, kCfg.member(), kCfg.reference(), kCfg.disturbance(), opts));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(opts.horizon / kCfg.delta));
}
BENCHMARK(BM_Simulate)->Arg(15)->Arg(150)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
