#include <random>

#include <benchmark/benchmark.h>

#include "khintype/counting.hpp"
#include "khintype/expsum.hpp"
#include "khintype/nondegen.hpp"
#include "khintype/typicality.hpp"

using namespace khintype;

namespace {

SymMatrix random_sym(int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    SymMatrix M(d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) M.set(i, j, n(rng));
    return M;
}

void BM_Eigenvalues(benchmark::State& state) {
    const auto M = random_sym(static_cast<int>(state.range(0)), 1);
    std::vector<double> ev;
    for (auto _ : state) {
        eigenvalues_into(M, ev);
        benchmark::DoNotOptimize(ev.data());
    }
}
BENCHMARK(BM_Eigenvalues)->Arg(3)->Arg(4)->Arg(6)->Arg(10);

void BM_Eigenvalues3Approx(benchmark::State& state) {
    const auto M = random_sym(3, 2);
    double out[3];
    for (auto _ : state) {
        eigenvalues3_approx(M, out);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_Eigenvalues3Approx);

void BM_CheckRank2(benchmark::State& state) {
    const auto A = sample_operator(3, static_cast<int>(state.range(0)), 3);
    SearchSettings s;
    s.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(check_rank_k(A.pencil, 2, s).margin);
}
BENCHMARK(BM_CheckRank2)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_CountR(benchmark::State& state) {
    const auto tf = builtin("tracefree2");
    const CountQuery q{state.range(0), Rational(1, 16), Theta::parse("3/10,7/10,1/10,9/10", 2, 2)};
    for (auto _ : state) benchmark::DoNotOptimize(count_R(tf, q, {1}));
    state.SetItemsProcessed(state.iterations() * (state.range(0) + 1) * (state.range(0) + 1));
}
BENCHMARK(BM_CountR)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Majorant(benchmark::State& state) {
    const auto tf = builtin("tracefree2");
    for (auto _ : state) benchmark::DoNotOptimize(majorant(tf, 2048, Rational(1, 16), 0.1, 64, 1));
}
BENCHMARK(BM_Majorant)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
