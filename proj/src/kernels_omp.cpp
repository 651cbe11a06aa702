#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kernel_bodies.hpp"
#include "odfmix/kernels.hpp"

namespace odfmix::kernels::omp {

namespace {
using Index = long long;
Index as_index(std::size_t n) { return static_cast<Index>(n); }
}  // namespace

int max_threads() {
#ifdef _OPENMP
    return omp_in_parallel() ? 1 : omp_get_max_threads();
#else
    return 1;
#endif
}

void log_sb_column(const ClassFeatures& feats, const Packed10& A, double log_norm,
                   std::span<double> out) {
#pragma omp parallel
    {
        std::vector<double> scratch(feats.members);
#pragma omp for schedule(static)
        for (Index i = 0; i < as_index(feats.observations); ++i)
            out[i] = log_norm + detail::log_sb_one(feats.block(i), feats.members, A, scratch.data());
    }
}

void mixture_rows(std::span<const std::vector<double>* const> columns,
                  std::span<const double> log_alpha, std::span<double> out) {
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < as_index(out.size()); ++i)
        out[i] = detail::logsumexp_row(columns, log_alpha, static_cast<std::size_t>(i));
}

void kde_power_sums(const ClassPoints& centers, std::span<const Vec4> queries, double kappa,
                    std::span<double> out) {
    const detail::PowerPlan plan(kappa);
#pragma omp parallel for schedule(dynamic, 64)
    for (Index q = 0; q < as_index(queries.size()); ++q)
        out[q] = detail::kde_power_one(centers, queries[q], plan);
}

void loo_power_sums(const ClassPoints& points, double kappa0, std::size_t ladder,
                    std::span<double> out) {
    if (ladder > detail::kMaxLadder) throw std::invalid_argument("loo_power_sums supports at most 8 ladder steps");
    const detail::PowerPlan plan(kappa0);
#pragma omp parallel for schedule(dynamic, 16)
    for (Index i = 0; i < as_index(points.points); ++i)
        detail::loo_power_one(points, plan, ladder, static_cast<std::size_t>(i),
                              out.data() + i * ladder);
}

void normalizer_values(std::span<const std::array<double, 3>> lambdas, std::size_t nodes,
                       std::span<double> out) {
    const detail::HopfRule rule(nodes);
#pragma omp parallel for schedule(dynamic, 8)
    for (Index t = 0; t < as_index(lambdas.size()); ++t)
        out[t] = rule.integrate(lambdas[t][0], lambdas[t][1], lambdas[t][2], 0.0);
}

}  // namespace odfmix::kernels::omp
