#include <gtest/gtest.h>

#include <random>

#include "odfmix/bingham.hpp"
#include "oracles.hpp"

using namespace odfmix;

namespace {
UnitQuaternion random_quat(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    return UnitQuaternion::normalize(n(rng), n(rng), n(rng), n(rng));
}

Vec4 moments(const BinghamComponent& comp, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    BinghamSampler s(comp);
    Vec4 m{};
    for (std::size_t i = 0; i < n; ++i) {
        const auto g = s(rng);
        for (int d = 0; d < 4; ++d) m[d] += std::pow(dot(comp.V()[d], g.vec()), 2) / n;
    }
    return m;
}
}  // namespace

TEST(Bingham, FrameIsOrthonormalWithFirstColumn) {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 100; ++t) {
        const auto q = random_quat(rng);
        const auto V = quaternion_frame(q);
        EXPECT_EQ(V[0], q.vec());
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) EXPECT_NEAR(dot(V[a], V[b]), a == b ? 1.0 : 0.0, 1e-15);
    }
}

TEST(Bingham, ScaleValidation) {
    EXPECT_THROW(validate_scales({1, 2, 0, 0}), std::invalid_argument);
    EXPECT_THROW(validate_scales({3, 2, 1, 0.5}), std::invalid_argument);
    EXPECT_THROW(validate_scales({3, 2, -1, 0}), std::invalid_argument);
    EXPECT_NO_THROW(validate_scales({3, 3, 0, 0}));
}

TEST(Bingham, RotatedColumnsStayOrthonormal) {
    std::mt19937_64 rng(32);
    const auto qc = symmetry_group("cubic-24"), qs = symmetry_group("cyclic-2");
    const BinghamComponent c({5, 2, 1, 0}, random_quat(rng));
    for (const auto& a : qc.elements())
        for (const auto& b : qs.elements()) {
            const auto r = c.rotated(a, b);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) EXPECT_NEAR(dot(r.V()[i], r.V()[j]), i == j ? 1.0 : 0.0, 1e-12);
        }
}

TEST(Bingham, UniformLogDensity) {
    std::mt19937_64 rng(33);
    const auto qc = symmetry_group("cubic-24"), qs = symmetry_group("cyclic-2");
    const BinghamComponent c({0, 0, 0, 0}, random_quat(rng));
    for (int t = 0; t < 10; ++t)
        EXPECT_NEAR(sb_logpdf(random_quat(rng), c, qc, qs, default_table()), -std::log(2 * oracle::pi * oracle::pi),
                    1e-12);
    EXPECT_NEAR(-std::log(2 * oracle::pi * oracle::pi), -2.9826, 1e-4);
}

TEST(Bingham, SymmetryAndAntipodalInvariance) {
    std::mt19937_64 rng(34);
    const auto qc = symmetry_group("cubic-24"), qs = symmetry_group("cyclic-2");
    for (int t = 0; t < 10; ++t) {
        const BinghamComponent c({40, 9, 3, 0}, random_quat(rng));
        const auto g = random_quat(rng);
        const double base = sb_logpdf(g, c, qc, qs, default_table());
        EXPECT_EQ(sb_logpdf(-g, c, qc, qs, default_table()), base);
        for (const auto& a : qc.elements())
            for (const auto& b : qs.elements())
                EXPECT_NEAR(sb_logpdf(a * g * b, c, qc, qs, default_table()), base, 1e-12);
    }
}

TEST(Bingham, SymmetricDensityIntegratesToOne) {
    std::mt19937_64 rng(35);
    const auto qc = symmetry_group("cubic-24");
    const BinghamComponent c({5, 2, 1, 0}, random_quat(rng));
    const double logF = std::log(oracle::bingham_f(c.lambda()));
    const double total = hopf_quadrature(
        [&](const Vec4& x) { return std::exp(sb_logpdf(UnitQuaternion::normalize(x), c, qc, SymmetryGroup{}, logF)); },
        48);
    EXPECT_NEAR(total, 1.0, 0.01);
}

TEST(Bingham, FIsIndependentOfFrame) {
    std::mt19937_64 rng(36);
    const Vec4 l{8, 3, 1, 0};
    for (int t = 0; t < 3; ++t) {
        const BinghamComponent c(l, random_quat(rng));
        const double v = hopf_quadrature([&](const Vec4& x) { return std::exp(-c.quadratic(x)); }, 64);
        EXPECT_NEAR(v / oracle::bingham_f(l), 1.0, 1e-8);
    }
}

TEST(BinghamSampler, UniformLimit) {
    Rng rng(37);
    const BinghamComponent c({0, 0, 0, 0}, UnitQuaternion::identity());
    std::array<double, 16> m{};
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        const auto g = sample_bingham(c, rng);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) m[a * 4 + b] += g[a] * g[b] / n;
    }
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) EXPECT_NEAR(m[a * 4 + b], a == b ? 0.25 : 0.0, 0.02);
}

TEST(BinghamSampler, MomentsMatchOracle) {
    std::mt19937_64 rng(38);
    for (const Vec4& l : {Vec4{5, 2, 1, 0}, Vec4{50, 50, 50, 0}, Vec4{80, 10, 0, 0}}) {
        const BinghamComponent c(l, random_quat(rng));
        const Vec4 emp = moments(c, 40000, 39);
        const Vec4 ref = oracle::bingham_second_moments(l);
        for (int d = 0; d < 4; ++d) EXPECT_NEAR(emp[d], ref[d], 0.01) << "d=" << d;
    }
}

TEST(BinghamSampler, ConcentratesNearFourthColumn) {
    const BinghamComponent c({50, 50, 50, 0}, UnitQuaternion::normalize(0.5, 0.5, 0.5, 0.5));
    const Vec4 emp = moments(c, 20000, 40);
    EXPECT_GT(emp[3], 0.965);
    EXPECT_GT(oracle::bingham_second_moments(c.lambda())[3], 0.969);
}

TEST(BinghamSampler, EnvelopeAcceptanceMatchesEmpirical) {
    Rng rng(41);
    BinghamSampler s(BinghamComponent({20, 6, 1, 0}, UnitQuaternion::identity()));
    for (int i = 0; i < 20000; ++i) s(rng);
    EXPECT_GT(s.envelope_b(), 1.0);
    EXPECT_LT(s.envelope_b(), 4.0);
    EXPECT_NEAR(s.empirical_acceptance(), s.envelope_acceptance(), 0.02);
}

TEST(BinghamSampler, SymmetricDrawsReduceWithIdentityGroups) {
    const BinghamComponent c({5, 2, 1, 0}, UnitQuaternion::identity());
    Rng a(42), b(42);
    // identity groups still consume the (j, k) draws
    std::uniform_int_distribution<std::size_t> pick(0, 0);
    pick(b);
    pick(b);
    EXPECT_EQ(sample_symmetric_bingham(c, SymmetryGroup{}, SymmetryGroup{}, a), sample_bingham(c, b));
}
