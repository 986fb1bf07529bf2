#include "bch/kernels.hpp"
#include "bch/solver.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

using namespace bch;

namespace {

struct Data {
    explicit Data(std::size_t n) : grid(n, 1.0), phi(n), phi_x(n), out(n)
    {
        for (std::size_t i = 0; i < n; ++i) {
            const double x = grid.x(i);
            phi[i] = std::tanh(10.0 * std::sin(3.0 * x));
            phi_x[i] = std::cos(7.0 * x);
        }
        const std::size_t m = grid.modes();
        spec.assign(m, Complex(1.0, -0.5));
        chem.assign(m, Complex(0.25, 0.1));
        adv.assign(m, Complex(-0.1, 0.3));
    }
    Grid grid;
    std::vector<double> phi, phi_x, out;
    Spectrum spec, chem, adv;
};

template <bool Parallel>
void chemical(benchmark::State& st)
{
    Data d(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        if constexpr (Parallel)
            kernels::explicit_chemical(d.phi, d.out, 1.0, 1.0, 2.0);
        else
            kernels::serial::explicit_chemical(d.phi, d.out, 1.0, 1.0, 2.0);
        benchmark::DoNotOptimize(d.out.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void phase(benchmark::State& st)
{
    Data d(static_cast<std::size_t>(st.range(0)));
    const auto k = d.grid.wavenumbers();
    for (auto _ : st) {
        if constexpr (Parallel)
            kernels::phase_update(d.spec, d.chem, d.adv, k, 1e-6, 1e-3, 2.0);
        else
            kernels::serial::phase_update(d.spec, d.chem, d.adv, k, 1e-6, 1e-3, 2.0);
        benchmark::DoNotOptimize(d.spec.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(d.spec.size()));
}

template <bool Parallel>
void energy(benchmark::State& st)
{
    Data d(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        double e = 0.0;
        if constexpr (Parallel)
            e = kernels::energy_sum(d.phi, d.phi_x, 1.0, 1.0, 1e-3, d.grid.dx());
        else
            e = kernels::serial::energy_sum(d.phi, d.phi_x, 1.0, 1.0, 1e-3, d.grid.dx());
        benchmark::DoNotOptimize(e);
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

// One full coupled step (FFTs included) at the kernels' current thread count.
void coupled_step(benchmark::State& st)
{
    const auto n = static_cast<std::size_t>(st.range(0));
    const Grid g(n, 1.0);
    Params p;
    State s(sample(g, [](double x) { return 0.5 * std::sin(3.0 * 3.14159265358979 * x); }),
            sample(g, [](double x) { return 0.5 * std::sin(3.14159265358979 * x); }), p,
            Coupling::advective, 2.0);
    Stepper stepper(g);
    for (auto _ : st) {
        State copy = s;
        benchmark::DoNotOptimize(stepper.advance(copy, 1e-6));
    }
}

} // namespace

#define BCH_SIZES ->RangeMultiplier(4)->Range(2048, 1 << 19)

BENCHMARK(chemical<false>) BCH_SIZES;
BENCHMARK(chemical<true>) BCH_SIZES;
BENCHMARK(phase<false>) BCH_SIZES;
BENCHMARK(phase<true>) BCH_SIZES;
BENCHMARK(energy<false>) BCH_SIZES;
BENCHMARK(energy<true>) BCH_SIZES;
BENCHMARK(coupled_step)->Arg(2048)->Arg(8192)->Arg(1 << 16);

BENCHMARK_MAIN();
