#include <benchmark/benchmark.h>

#include <geodex/jacobi.hpp>

using namespace geodex;

namespace {

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

ChartDomain box3() { return ChartDomain::box(v3(-6, -6, -6), v3(6, 6, 6)); }

void BM_ShootFlat(benchmark::State& state) {
    const auto m = make_flat(box3());
    for (auto _ : state) {
        benchmark::DoNotOptimize(shoot(m, v3(0, 0, 0), v3(1.3, 0.4, -0.2), 1.0));
    }
}
BENCHMARK(BM_ShootFlat);

void BM_ShootSphere(benchmark::State& state) {
    const auto m = make_sphere_cap(box3(), 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(shoot(m, v3(0.3, 0, 0), v3(0.4, 2.0, -0.6), 1.0));
    }
}
BENCHMARK(BM_ShootSphere);

void BM_JacobiPropagate(benchmark::State& state) {
    const auto m = make_sphere_cap(box3(), 1.0);
    const auto path = shoot(m, v3(0.3, 0, 0), v3(0.4, 2.0, -0.6), 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(jacobi_propagate(path));
    }
}
BENCHMARK(BM_JacobiPropagate);

} // namespace
