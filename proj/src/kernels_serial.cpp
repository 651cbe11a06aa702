#include <cmath>
#include <stdexcept>
#include <vector>

#include "kernel_bodies.hpp"
#include "odfmix/kernels.hpp"

namespace odfmix::kernels {

Packed10 pack_quadratic(const Vec4& lambda, const std::array<Vec4, 4>& V) {
    Packed10 a{};
    for (std::size_t d = 0; d < 4; ++d) {
        const double l = lambda[d];
        if (l == 0.0) continue;
        const Vec4& v = V[d];
        a[0] += l * v[0] * v[0];
        a[1] += l * v[1] * v[1];
        a[2] += l * v[2] * v[2];
        a[3] += l * v[3] * v[3];
        a[4] += 2.0 * l * v[0] * v[1];
        a[5] += 2.0 * l * v[0] * v[2];
        a[6] += 2.0 * l * v[0] * v[3];
        a[7] += 2.0 * l * v[1] * v[2];
        a[8] += 2.0 * l * v[1] * v[3];
        a[9] += 2.0 * l * v[2] * v[3];
    }
    return a;
}

Packed10 quadratic_features(const Vec4& x) {
    return {x[0] * x[0], x[1] * x[1], x[2] * x[2], x[3] * x[3], x[0] * x[1],
            x[0] * x[2], x[0] * x[3], x[1] * x[2], x[1] * x[3], x[2] * x[3]};
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

namespace serial {

void log_sb_column(const ClassFeatures& feats, const Packed10& A, double log_norm,
                   std::span<double> out) {
    std::vector<double> scratch(feats.members);
    for (std::size_t i = 0; i < feats.observations; ++i)
        out[i] = log_norm + detail::log_sb_one(feats.block(i), feats.members, A, scratch.data());
}

void mixture_rows(std::span<const std::vector<double>* const> columns,
                  std::span<const double> log_alpha, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = detail::logsumexp_row(columns, log_alpha, i);
}

void kde_power_sums(const ClassPoints& centers, std::span<const Vec4> queries, double kappa,
                    std::span<double> out) {
    const detail::PowerPlan plan(kappa);
    for (std::size_t q = 0; q < queries.size(); ++q)
        out[q] = detail::kde_power_one(centers, queries[q], plan);
}

void loo_power_sums(const ClassPoints& points, double kappa0, std::size_t ladder,
                    std::span<double> out) {
    if (ladder > detail::kMaxLadder) throw std::invalid_argument("loo_power_sums supports at most 8 ladder steps");
    const detail::PowerPlan plan(kappa0);
    for (std::size_t i = 0; i < points.points; ++i)
        detail::loo_power_one(points, plan, ladder, i, out.data() + i * ladder);
}

void normalizer_values(std::span<const std::array<double, 3>> lambdas, std::size_t nodes,
                       std::span<double> out) {
    const detail::HopfRule rule(nodes);
    for (std::size_t t = 0; t < lambdas.size(); ++t)
        out[t] = rule.integrate(lambdas[t][0], lambdas[t][1], lambdas[t][2], 0.0);
}

}  // namespace serial
}  // namespace odfmix::kernels
