#include <benchmark/benchmark.h>

#include <random>

#include "cqp/equiv/bisim.hpp"
#include "cqp/protocols/teleport.hpp"
#include "cqp/qlin.hpp"
#include "cqp/sem/lts.hpp"

using namespace cqp;

namespace {

qlin::PureState random_register(int d, int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<qlin::Complex> amps(qlin::ipow(d, static_cast<std::size_t>(n)));
    double norm = 0.0;
    for (auto &a : amps) {
        a = {g(rng), g(rng)};
        norm += std::norm(a);
    }
    for (auto &a : amps) {
        a /= std::sqrt(norm);
    }
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) {
        names.push_back("q" + std::to_string(i));
    }
    return qlin::PureState(d, names, amps);
}

void BM_ApplyTwoQuditGate(benchmark::State &state) {
    const int d = static_cast<int>(state.range(0));
    const auto s = random_register(d, 5, 1);
    const auto g = qlin::cnot_rshift(d);
    for (auto _ : state) {
        benchmark::DoNotOptimize(qlin::apply_gate(s, g, {"q3", "q1"}));
    }
}
BENCHMARK(BM_ApplyTwoQuditGate)->Arg(2)->Arg(3)->Arg(5);

void BM_MeasureTwo(benchmark::State &state) {
    const int d = static_cast<int>(state.range(0));
    const auto s = random_register(d, 5, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(qlin::measure_qudits(s, {"q4", "q0"}));
    }
}
BENCHMARK(BM_MeasureTwo)->Arg(2)->Arg(3)->Arg(5);

void BM_TeleportLts(benchmark::State &state) {
    const auto prog = protocols::teleport_program(static_cast<int>(state.range(0)));
    std::size_t nodes = 0;
    for (auto _ : state) {
        nodes = sem::build_lts(prog).size();
    }
    state.counters["nodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_TeleportLts)->Arg(2)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_TeleportEquiv(benchmark::State &state) {
    const int d = static_cast<int>(state.range(0));
    const auto t = protocols::teleport_program(d);
    const auto w = protocols::qwire_program(d);
    equiv::FullOptions o;
    o.parallel = false;
    for (auto _ : state) {
        benchmark::DoNotOptimize(equiv::check_full_bisim(t, w, o).bisimilar);
    }
}
BENCHMARK(BM_TeleportEquiv)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
