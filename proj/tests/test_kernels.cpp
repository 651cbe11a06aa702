#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../src/kernel_bodies.hpp"
#include "odfmix/bingham.hpp"
#include "odfmix/kernels.hpp"

using namespace odfmix;

TEST(Kernels, ExpNegMatchesStdExp) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 700.0);
    double worst = 0.0;
    for (int t = 0; t < 200000; ++t) {
        const double x = t < 1000 ? t * 0.1 : u(rng);
        worst = std::max(worst, std::fabs(kernels::detail::exp_neg(x) / std::exp(-x) - 1.0));
    }
    EXPECT_LT(worst, 4e-16);
    EXPECT_EQ(kernels::detail::exp_neg(0.0), 1.0);
}

TEST(Kernels, SerialAndOpenMpAreBitIdentical) {
    Rng rng(2);
    const auto qc = symmetry_group("cubic-24"), qs = symmetry_group("cyclic-2");
    kernels::ClassFeatures f;
    kernels::ClassPoints p;
    f.observations = p.points = 300;
    f.members = p.members = 48;
    f.data.resize(300 * 4 * 48);
    for (std::size_t i = 0; i < 300; ++i) {
        const auto cls = equivalence_class(sample_uniform(rng), qc, qs);
        for (std::size_t h = 0; h < 48; ++h) {
            f.set(i, h, cls[h].vec());
            p.data.push_back(cls[h].vec());
        }
    }
    const BinghamComponent comp({30, 12, 4, 0}, sample_uniform(rng));
    const auto A = kernels::pack_quadratic(comp.lambda(), comp.V());
    std::vector<double> a(300), b(300);
    kernels::serial::log_sb_column(f, A, -1.5, a);
    kernels::omp::log_sb_column(f, A, -1.5, b);
    EXPECT_EQ(a, b);

    std::vector<const std::vector<double>*> cols{&a, &b};
    const std::vector<double> la{std::log(0.3), std::log(0.7)};
    std::vector<double> ra(300), rb(300);
    kernels::serial::mixture_rows(cols, la, ra);
    kernels::omp::mixture_rows(cols, la, rb);
    EXPECT_EQ(ra, rb);

    std::vector<Vec4> q(40);
    for (auto& v : q) v = sample_uniform(rng).vec();
    std::vector<double> ka(40), kb(40);
    kernels::serial::kde_power_sums(p, q, 12.0, ka);
    kernels::omp::kde_power_sums(p, q, 12.0, kb);
    EXPECT_EQ(ka, kb);

    std::vector<double> la1(300 * 5), lb1(300 * 5);
    kernels::serial::loo_power_sums(p, 2.5, 5, la1);
    kernels::omp::loo_power_sums(p, 2.5, 5, lb1);
    EXPECT_EQ(la1, lb1);
}

TEST(Kernels, PackedQuadraticMatchesComponent) {
    Rng rng(3);
    const BinghamComponent comp({9, 5, 2, 0}, sample_uniform(rng));
    const auto A = kernels::pack_quadratic(comp.lambda(), comp.V());
    for (int t = 0; t < 50; ++t) {
        const auto x = sample_uniform(rng).vec();
        const auto f = kernels::quadratic_features(x);
        double v = 0.0;
        for (int i = 0; i < 10; ++i) v += A[i] * f[i];
        EXPECT_NEAR(v, comp.quadratic(x), 1e-12);
    }
}
