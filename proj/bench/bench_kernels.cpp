// Serial reference against the OpenMP kernels on identical blocks.

#include "primlat/kernels.hpp"
#include "primlat/measure.hpp"

#include <benchmark/benchmark.h>

using namespace primlat;

namespace {

std::vector<PrimitiveBlock> blocks(std::size_t n, double radius, EnumerationMode mode) {
  std::vector<PrimitiveBlock> out;
  enumerate_primitive(n, radius, mode, [&](const PrimitiveBlock& b) { out.push_back(b); });
  return out;
}

void run(benchmark::State& state, std::size_t n, double radius, bool parallel) {
  const auto bs = blocks(n, radius, EnumerationMode::full);
  std::size_t items = 0;
  for (auto _ : state) {
    std::vector<Observation> out;
    for (const auto& b : bs) {
      if (parallel)
        observe_block_parallel(b, out, static_cast<int>(state.range(0)));
      else
        observe_block_serial(b, out);
    }
    items += out.size();
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(items));
}

void BM_ObserveN2Serial(benchmark::State& s) { run(s, 2, 400, false); }
void BM_ObserveN2Parallel(benchmark::State& s) { run(s, 2, 400, true); }
void BM_ObserveN3Serial(benchmark::State& s) { run(s, 3, 30, false); }
void BM_ObserveN3Parallel(benchmark::State& s) { run(s, 3, 30, true); }
void BM_ObserveN4Serial(benchmark::State& s) { run(s, 4, 5, false); }
void BM_ObserveN4Parallel(benchmark::State& s) { run(s, 4, 5, true); }

void BM_NuEstimateN3(benchmark::State& state) {
  std::vector<Observation> recs;
  enumerate_primitive(3, 40, EnumerationMode::orbits, [&](const PrimitiveBlock& b) { observe_block_serial(b, recs); });
  NuOptions o;
  o.threads = static_cast<int>(state.range(0));
  const auto grid = uniform_grid(101);
  for (auto _ : state) benchmark::DoNotOptimize(nu_estimate(recs, grid, o).cdf.data());
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * recs.size()));
}

void BM_EnumerateN3(benchmark::State& state) {
  for (auto _ : state) {
    std::size_t count = 0;
    enumerate_primitive(3, 60, EnumerationMode::full, [&](const PrimitiveBlock& b) { count += b.size(); });
    benchmark::DoNotOptimize(count);
  }
}

}  // namespace

BENCHMARK(BM_ObserveN2Serial)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ObserveN2Parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ObserveN3Serial)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ObserveN3Parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ObserveN4Serial)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ObserveN4Parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_NuEstimateN3)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EnumerateN3)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
