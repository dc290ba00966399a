// Microbenchmarks for the hot paths: sparse polynomial products, weighted
// norms, the frequency-by-frequency solver, the Galerkin least-squares solver
// and the weight-analysis routines.
#include <benchmark/benchmark.h>

#include <sobscale/fredholm.hpp>
#include <sobscale/operators.hpp>
#include <sobscale/rofunc.hpp>
#include <sobscale/torus.hpp>

#include <complex>
#include <vector>

namespace {

using namespace sobscale;

const RoFunction kFlat = RoFunction::log_power(0.0);

ScalarDiffOp d1() { return ScalarDiffOp::derivative_op(1, {1}); }

MatrixDiffOp coupled() {
    return MatrixDiffOp(2, 1,
                        {d1(), ScalarDiffOp::multiplication(TrigPoly::constant(1, 1.0)),
                         ScalarDiffOp::multiplication(TrigPoly::constant(1, -1.0)), d1()});
}

MatrixDiffOp variable_coupled() {
    const TrigPoly cos_term = TrigPoly::monomial(1, Frequency{{1}}, 0.1) +
                              TrigPoly::monomial(1, Frequency{{-1}}, 0.1);
    return MatrixDiffOp(2, 1,
                        {d1() + ScalarDiffOp::multiplication(cos_term),
                         ScalarDiffOp::multiplication(TrigPoly::constant(1, 1.0)),
                         ScalarDiffOp::multiplication(TrigPoly::constant(1, -1.0)), d1()});
}

TrigVector random_rhs(int band, std::uint64_t seed) {
    return TrigVector(std::vector<TrigPoly>{random_trig(1, band, kFlat, 1.0, seed),
                                            random_trig(1, band, kFlat, 1.0, seed + 17)});
}

void BM_PolyMultiply(benchmark::State& state) {
    const int band = static_cast<int>(state.range(0));
    const TrigPoly a = random_trig(1, band, kFlat, 1.0, 1);
    const TrigPoly b = random_trig(1, band, kFlat, 1.0, 2);
    for (auto _ : state) benchmark::DoNotOptimize(multiply(a, b));
}
BENCHMARK(BM_PolyMultiply)->Arg(16)->Arg(64);

void BM_WeightedNorm(benchmark::State& state) {
    const TrigPoly u = random_trig(1, 256, kFlat, 1.0, 3);
    const RoFunction phi = RoFunction::log_power(1.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(hnorm(u, phi));
}
BENCHMARK(BM_WeightedNorm);

void BM_SolveConst(benchmark::State& state) {
    const MatrixDiffOp A = coupled();
    const TrigVector f = random_rhs(static_cast<int>(state.range(0)), 5);
    const RoFunction phi = RoFunction::log_power(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_const(A, f, phi));
}
BENCHMARK(BM_SolveConst)->Arg(32)->Arg(128);

void BM_Galerkin(benchmark::State& state) {
    const int K = static_cast<int>(state.range(0));
    const MatrixDiffOp A = variable_coupled();
    const TrigVector f = random_rhs(K - 2, 7);
    for (auto _ : state) benchmark::DoNotOptimize(solve_galerkin(A, f, K));
}
BENCHMARK(BM_Galerkin)->Arg(8)->Arg(16)->Arg(32);

void BM_IndexEstimate(benchmark::State& state) {
    const RoFunction phi = RoFunction::power_sine_log(1.0, 0.3);
    for (auto _ : state) benchmark::DoNotOptimize(matuszewska_estimate(phi));
}
BENCHMARK(BM_IndexEstimate);

void BM_EmbeddingIntegral(benchmark::State& state) {
    const RoFunction phi = RoFunction::power_sine_log(0.75, 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(embedding_integral(phi, 0, 1, 0));
}
BENCHMARK(BM_EmbeddingIntegral);

}  // namespace

BENCHMARK_MAIN();
