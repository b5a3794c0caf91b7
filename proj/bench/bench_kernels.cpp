// OpenMP kernels against their serial references, plus one controller step.

#include <benchmark/benchmark.h>

#include <random>

#include "rss/kernels.hpp"
#include "rss/rhc.hpp"

using namespace rss;

namespace {

std::vector<kernels::WeightedArc> grid_arcs(int side) {
  const RoadNetwork net = make_grid({side, side, 100, 10, GridScheme::two_way});
  std::vector<kernels::WeightedArc> out;
  for (const auto& a : net.arcs()) out.push_back({a.from, a.to, a.length_m});
  return out;
}

void BM_AllPairsParallel(benchmark::State& st) {
  const int side = static_cast<int>(st.range(0));
  const auto arcs = grid_arcs(side);
  const auto n = static_cast<std::size_t>(side * side);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::all_pairs_parallel(n, arcs));
}

void BM_AllPairsSerial(benchmark::State& st) {
  const int side = static_cast<int>(st.range(0));
  const auto arcs = grid_arcs(side);
  const auto n = static_cast<std::size_t>(side * side);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::all_pairs_serial(n, arcs));
}

std::vector<kernels::SlotOptions> random_slots(int count, int options) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> val(0.0, 10.0);
  std::uniform_int_distribution<int> key(-1, count * 2);
  std::vector<kernels::SlotOptions> slots(static_cast<std::size_t>(count));
  for (auto& s : slots) {
    for (int o = 0; o < options; ++o) {
      s.value.push_back(val(rng));
      s.conflict_key.push_back(key(rng));
      s.order_key.push_back(o);
    }
  }
  return slots;
}

void BM_ExhaustiveParallel(benchmark::State& st) {
  const auto slots = random_slots(static_cast<int>(st.range(0)), 4);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::exhaustive_search_parallel(slots));
}

void BM_ExhaustiveSerial(benchmark::State& st) {
  const auto slots = random_slots(static_cast<int>(st.range(0)), 4);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::exhaustive_search_serial(slots));
}

void BM_BranchAndBound(benchmark::State& st) {
  const auto slots = random_slots(static_cast<int>(st.range(0)), 4);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::branch_and_bound_search(slots, 1'000'000));
}

// 38 vehicles and 50 waiting passengers on a 20 x 20 grid
void BM_RhcDecide(benchmark::State& st) {
  const RoadNetwork net = make_grid({20, 20, 100, 10, GridScheme::two_way});
  std::mt19937_64 rng(38);
  std::uniform_int_distribution<int> node(0, static_cast<int>(net.node_count()) - 1);
  SystemState s;
  for (int v = 1; v <= 38; ++v)
    apply_event(net, s, SimEvent::make_join(0, VehicleId{v}, net.node_point(node(rng)), 4, 10));
  for (int p = 1; p <= 50; ++p) {
    const int o = node(rng);
    int d = node(rng);
    while (d == o) d = node(rng);
    apply_event(net, s, SimEvent::make_request(0, PassengerId{p}, net.node_point(o), net.node_point(d)));
  }
  rhc::RhcController ctl(net, rhc::RhcConfig{});
  for (auto _ : st) benchmark::DoNotOptimize(ctl.decide(s, std::nullopt));
}

}  // namespace

BENCHMARK(BM_AllPairsParallel)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AllPairsSerial)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExhaustiveParallel)->Arg(6)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExhaustiveSerial)->Arg(6)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BranchAndBound)->Arg(6)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RhcDecide)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
