#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "snn/countmin.hpp"
#include "snn/median.hpp"
#include "snn/simulator.hpp"

using namespace snn;

namespace {

const CountMinNet& countmin_net() {
  static const CountMinNet cm = [] {
    CountMinParams p;
    p.n = 1024;
    p.m = 1024;
    p.eps = 0.05;
    p.delta = 0.05;
    return build_countmin_net(p);
  }();
  return cm;
}

const MedianNet& median_net() {
  static const MedianNet md = [] {
    MedianParams p;
    p.n = 256;
    p.m = 256;
    return build_median_net(p);
  }();
  return md;
}

InputBits countmin_input(std::uint64_t x) {
  const int kb = countmin_net().params.key_bits();
  InputBits bits(kb + 1, 0);
  bits[0] = 1;
  for (int b = 0; b < kb; ++b) bits[b + 1] = (x >> b) & 1;
  return bits;
}

InputBits median_input(std::uint64_t x) {
  InputBits bits(median_net().params.n + 1, 0);
  bits[x - 1] = 1;
  return bits;
}

// One update's worth of rounds with a full-scan kernel.
template <State (*Kernel)(const Network&, const State&, const InputBits&)>
void full_scan(benchmark::State& st, const Network& net, InputBits (*input)(std::uint64_t), int rounds) {
  State s(net.size(), 0);
  std::uint64_t x = 1;
  for (auto _ : st) {
    const auto bits = input(x);
    for (int k = 0; k < rounds; ++k) s = Kernel(net, s, bits);
    for (int k = 0; k < 2; ++k) s = Kernel(net, s, InputBits(bits.size(), 0));
    x = x % 200 + 1;
    benchmark::DoNotOptimize(s.data());
  }
  st.counters["rounds/s"] = benchmark::Counter(static_cast<double>(st.iterations()) * (rounds + 2), benchmark::Counter::kIsRate);
}

void event_driven(benchmark::State& st, const Network& net, InputBits (*input)(std::uint64_t), int rounds) {
  Simulator sim(net);
  std::uint64_t x = 1;
  for (auto _ : st) {
    sim.hold(input(x), rounds);
    sim.idle(2);
    x = x % 200 + 1;
  }
  st.counters["rounds/s"] = benchmark::Counter(static_cast<double>(st.iterations()) * (rounds + 2), benchmark::Counter::kIsRate);
}

void BM_CountMinReference(benchmark::State& st) {
  full_scan<step_reference>(st, countmin_net().net, countmin_input, countmin_net().hold);
}
void BM_CountMinParallel(benchmark::State& st) {
  full_scan<step_parallel>(st, countmin_net().net, countmin_input, countmin_net().hold);
}
void BM_CountMinEventDriven(benchmark::State& st) {
  event_driven(st, countmin_net().net, countmin_input, countmin_net().hold);
}
void BM_MedianReference(benchmark::State& st) {
  full_scan<step_reference>(st, median_net().net, median_input, median_net().insert_hold);
}
void BM_MedianParallel(benchmark::State& st) {
  full_scan<step_parallel>(st, median_net().net, median_input, median_net().insert_hold);
}
void BM_MedianEventDriven(benchmark::State& st) {
  event_driven(st, median_net().net, median_input, median_net().insert_hold);
}

// Independent Count-Min trials, serially and spread over OpenMP threads.
void trials(benchmark::State& st, bool parallel) {
  const int count = static_cast<int>(st.range(0));
  for (auto _ : st) {
    std::vector<std::uint64_t> answer(count);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int t = 0; t < count; ++t) {
      CountMinParams p;
      p.n = 256;
      p.m = 64;
      p.seed = static_cast<std::uint64_t>(t);
      CountMinNet cm = build_countmin_net(p);
      CountMinMachine m(cm);
      std::mt19937_64 rng(t);
      for (int k = 0; k < 64; ++k) m.inc(1 + rng() % 256);
      answer[t] = m.count(1);
    }
    benchmark::DoNotOptimize(answer.data());
  }
}
void BM_TrialsSerial(benchmark::State& st) { trials(st, false); }
void BM_TrialsParallel(benchmark::State& st) { trials(st, true); }

}  // namespace

BENCHMARK(BM_CountMinReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CountMinParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CountMinEventDriven)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MedianReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MedianParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MedianEventDriven)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsSerial)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsParallel)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
