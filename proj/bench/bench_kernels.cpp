#include "akc/balls.hpp"
#include "akc/chain.hpp"
#include "akc/equidistribution.hpp"

#include <benchmark/benchmark.h>

using namespace akc;

namespace {

ConjugatedRotation bench_map()
{
    TwistMap t{Axis::tau(2), Invariant::chi(2, 4), 300.0};
    TwistMap x{Axis::xi(1), Invariant::psi(2, 4), 120.0};
    TwistMap y{Axis::xi(2), Invariant::psi(1, 4), 50.0};
    return {2, Chain{{t, x, y}}, Rational::make(3, 4096)};
}

void BM_count_in_balls(benchmark::State& st)
{
    auto cloud = lebesgue_cloud(2, static_cast<std::size_t>(st.range(0)), 1);
    auto centers = lebesgue_cloud(2, 200, 2);
    auto sorted = sort_cloud(cloud);
    for (auto _ : st)
        benchmark::DoNotOptimize(count_in_balls(sorted, centers, 0.25));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_count_in_balls_serial(benchmark::State& st)
{
    auto cloud = lebesgue_cloud(2, static_cast<std::size_t>(st.range(0)), 1);
    auto centers = lebesgue_cloud(2, 200, 2);
    for (auto _ : st)
        benchmark::DoNotOptimize(count_in_balls_serial(cloud, centers, 0.25));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_orbit(benchmark::State& st)
{
    auto f = bench_map();
    auto x = lebesgue_sample(2, 1, 3)[0];
    for (auto _ : st)
        benchmark::DoNotOptimize(orbit(f, x, st.range(0)));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_orbit_serial(benchmark::State& st)
{
    auto f = bench_map();
    auto x = lebesgue_sample(2, 1, 3)[0];
    for (auto _ : st)
        benchmark::DoNotOptimize(orbit_serial(f, x, st.range(0)));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_push_forward(benchmark::State& st)
{
    auto f = bench_map();
    auto cloud = lebesgue_cloud(2, static_cast<std::size_t>(st.range(0)), 4);
    for (auto _ : st)
        benchmark::DoNotOptimize(push_forward(f.h, cloud));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_lebesgue_cloud(benchmark::State& st)
{
    for (auto _ : st)
        benchmark::DoNotOptimize(lebesgue_cloud(2, static_cast<std::size_t>(st.range(0)), 5));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_sup_distance(benchmark::State& st)
{
    auto f = bench_map();
    ConjugatedRotation g{2, Chain{}, f.alpha};
    std::vector<std::int64_t> powers{1, 2, 4, 8, 16, 32, 64};
    for (auto _ : st)
        benchmark::DoNotOptimize(sup_distance_powers(f, g, powers, 1.05, static_cast<std::size_t>(st.range(0)), 6));
}

}  // namespace

BENCHMARK(BM_count_in_balls)->Arg(1 << 16)->Arg(1 << 18);
BENCHMARK(BM_count_in_balls_serial)->Arg(1 << 16);
BENCHMARK(BM_orbit)->Arg(1 << 16);
BENCHMARK(BM_orbit_serial)->Arg(1 << 16);
BENCHMARK(BM_push_forward)->Arg(1 << 16);
BENCHMARK(BM_lebesgue_cloud)->Arg(1 << 18);
BENCHMARK(BM_sup_distance)->Arg(256);

BENCHMARK_MAIN();
