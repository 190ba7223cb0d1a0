#include <benchmark/benchmark.h>

#include "kiosk/breakeven.hpp"
#include "kiosk/engine.hpp"
#include "kiosk/random.hpp"

namespace {

void BM_SimulateCell(benchmark::State& state) {
    kiosk::ModelConfig cfg;
    cfg.customers_per_cell = static_cast<std::uint64_t>(state.range(0));
    std::uint64_t index = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kiosk::simulate_cell({0.4, 0.3, 0.2, 0.4}, cfg, index++));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateCell)->Arg(1000)->Arg(100'000);

void BM_DeriveCellSeed(benchmark::State& state) {
    std::uint64_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(kiosk::derive_cell_seed(20210616, i++));
}
BENCHMARK(BM_DeriveCellSeed);

void BM_SamplePrice(benchmark::State& state) {
    kiosk::RandomStream stream(7);
    const kiosk::Category cases{"cases", 1.0, 29.0, 8.0};
    for (auto _ : state) benchmark::DoNotOptimize(kiosk::sample_price(stream, cases));
}
BENCHMARK(BM_SamplePrice);

void BM_Breakeven(benchmark::State& state) {
    const kiosk::DiscountLaw law;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kiosk::breakeven(0.5, 0.4, law, kiosk::IntentionUpdateRule::Multiplicative,
                                                  kiosk::MarginAccounting::DiscountAllDisplayBuyers));
    }
}
BENCHMARK(BM_Breakeven);

}  // namespace
