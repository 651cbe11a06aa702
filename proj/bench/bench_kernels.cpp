// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>

#include "odfmix/bingham.hpp"
#include "odfmix/kernels.hpp"
#include "odfmix/mixture.hpp"

using namespace odfmix;

namespace {

Dataset make_data(std::size_t n) {
    Rng rng(1);
    Dataset d{{}, symmetry_group("cubic-24"), symmetry_group("cyclic-2"), "bench"};
    for (std::size_t i = 0; i < n; ++i) d.observations.push_back(sample_uniform(rng));
    return d;
}

kernels::ClassFeatures features(std::size_t n) {
    const Dataset d = make_data(n);
    kernels::ClassFeatures f;
    f.observations = n;
    f.members = d.qc.size() * d.qs.size();
    f.data.resize(n * 4 * f.members);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d.qc.size(); ++j)
            for (std::size_t k = 0; k < d.qs.size(); ++k)
                f.set(i, j * d.qs.size() + k, (d.qc[j].conj() * d.observations[i] * d.qs[k].conj()).vec());
    return f;
}

kernels::ClassPoints points(std::size_t n) {
    const Dataset d = make_data(n);
    kernels::ClassPoints p;
    p.points = n;
    p.members = d.qc.size() * d.qs.size();
    for (const auto& g : d.observations)
        for (const auto& h : equivalence_class(g, d.qc, d.qs)) p.data.push_back(h.vec());
    return p;
}

template <bool Parallel>
void column(benchmark::State& st) {
    const auto f = features(static_cast<std::size_t>(st.range(0)));
    const BinghamComponent comp({20, 10, 5, 0}, UnitQuaternion::axis_angle(1, 2, 3, 0.4));
    const auto A = kernels::pack_quadratic(comp.lambda(), comp.V());
    std::vector<double> out(f.observations);
    for (auto _ : st) {
        if constexpr (Parallel) kernels::omp::log_sb_column(f, A, 0.0, out);
        else kernels::serial::log_sb_column(f, A, 0.0, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void rows(benchmark::State& st) {
    const std::size_t n = static_cast<std::size_t>(st.range(0));
    std::vector<std::vector<double>> cols(3, std::vector<double>(n));
    Rng rng(2);
    std::normal_distribution<double> nd;
    for (auto& c : cols)
        for (double& v : c) v = nd(rng);
    std::vector<const std::vector<double>*> ptrs{&cols[0], &cols[1], &cols[2]};
    const std::vector<double> la{std::log(0.2), std::log(0.3), std::log(0.5)};
    std::vector<double> out(n);
    for (auto _ : st) {
        if constexpr (Parallel) kernels::omp::mixture_rows(ptrs, la, out);
        else kernels::serial::mixture_rows(ptrs, la, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void kde(benchmark::State& st) {
    const auto centers = points(static_cast<std::size_t>(st.range(0)));
    Rng rng(3);
    std::vector<Vec4> q(256);
    for (auto& v : q) v = sample_uniform(rng).vec();
    std::vector<double> out(q.size());
    for (auto _ : st) {
        if constexpr (Parallel) kernels::omp::kde_power_sums(centers, q, 20.0, out);
        else kernels::serial::kde_power_sums(centers, q, 20.0, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void loo(benchmark::State& st) {
    const auto p = points(static_cast<std::size_t>(st.range(0)));
    std::vector<double> out(p.points * 7);
    for (auto _ : st) {
        if constexpr (Parallel) kernels::omp::loo_power_sums(p, 2.5, 7, out);
        else kernels::serial::loo_power_sums(p, 2.5, 7, out);
        benchmark::DoNotOptimize(out.data());
    }
}

}  // namespace

BENCHMARK(column<false>)->Name("log_sb_column/serial")->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond);
BENCHMARK(column<true>)->Name("log_sb_column/omp")->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond);
BENCHMARK(rows<false>)->Name("mixture_rows/serial")->Arg(2000)->Unit(benchmark::kMicrosecond);
BENCHMARK(rows<true>)->Name("mixture_rows/omp")->Arg(2000)->Unit(benchmark::kMicrosecond);
BENCHMARK(kde<false>)->Name("kde_power_sums/serial")->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(kde<true>)->Name("kde_power_sums/omp")->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(loo<false>)->Name("loo_power_sums/serial")->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(loo<true>)->Name("loo_power_sums/omp")->Arg(300)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
