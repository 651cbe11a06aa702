#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "odfmix/errors.hpp"
#include "odfmix/kernels.hpp"
#include "odfmix/normalizer.hpp"
#include "oracles.hpp"

using namespace odfmix;

namespace {
Vec4 random_scales(std::mt19937_64& rng, double hi) {
    std::uniform_real_distribution<double> u(0, hi);
    std::array<double, 3> l{u(rng), u(rng), u(rng)};
    std::sort(l.begin(), l.end(), std::greater<>());
    return {l[0], l[1], l[2], 0.0};
}
}  // namespace

TEST(Oracle, UniformValue) {
    EXPECT_NEAR(f_oracle({0, 0, 0, 0}).value, 2 * oracle::pi * oracle::pi, 1e-10);
    EXPECT_NEAR(f_oracle({0, 0, 0, 0}, {}, OracleMethod::QuasiMonteCarlo).value, 19.7392088021787, 1e-9);
}

TEST(Oracle, QuadratureMatchesBesselIntegral) {
    std::mt19937_64 rng(21);
    EXPECT_NEAR(f_oracle({5, 2, 1, 0}).value, 4.238950158145546, 1e-10);
    for (int t = 0; t < 20; ++t) {
        const Vec4 l = random_scales(rng, 100);
        EXPECT_NEAR(f_oracle(l).value / oracle::bingham_f(l), 1.0, 1e-9);
    }
}

TEST(Oracle, ShiftIdentity) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(0, 20);
    for (int t = 0; t < 20; ++t) {
        const Vec4 l = random_scales(rng, 60);
        const double c = u(rng);
        const Vec4 shifted{l[0] + c, l[1] + c, l[2] + c, c};
        EXPECT_NEAR(f_oracle(shifted).value / (std::exp(-c) * f_oracle(l).value), 1.0, 1e-6);
    }
}

TEST(Oracle, IndependentOfOrder) {
    EXPECT_NEAR(f_oracle({1, 5, 0, 2}).value, f_oracle({5, 2, 1, 0}).value, 1e-12);
}

TEST(Oracle, DualOracleAgreement) {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 5; ++t) {
        const Vec4 l = random_scales(rng, 50);
        const auto q = f_oracle(l);
        const auto m = f_oracle(l, {}, OracleMethod::QuasiMonteCarlo);
        EXPECT_LT(std::fabs(q.value - m.value), 3 * m.std_error + 1e-12) << l[0] << " " << l[1] << " " << l[2];
    }
}

TEST(Oracle, RangeErrorNamesCoordinate) {
    try {
        f_oracle({120, 0, 0, 0});
        FAIL();
    } catch (const RangeError& e) {
        EXPECT_EQ(e.coordinate(), 0);
        EXPECT_NE(std::string(e.what()).find("lambda1"), std::string::npos);
    }
    EXPECT_THROW(f_oracle({1, -1, 0, 0}), RangeError);
}

class TableTest : public ::testing::Test {
protected:
    static const NormalizerTable& table() { return default_table(); }
};

TEST_F(TableTest, OriginAndNodes) {
    const auto& t = table();
    EXPECT_NEAR(t.f({0, 0, 0, 0}), 2 * oracle::pi * oracle::pi, 1e-6);
    for (std::size_t i : {0u, 3u, 17u, 31u})
        for (std::size_t j : {0u, 5u, 31u}) {
            const Vec4 l{t.node_coordinate(i), t.node_coordinate(j), t.node_coordinate(2), 0};
            EXPECT_NEAR(t.f(l) / t.value_at(i, j, 2), 1.0, 1e-12);
            EXPECT_NEAR(t.value_at(i, j, 2) / oracle::bingham_f(l), 1.0, 1e-9);
        }
}

TEST_F(TableTest, CheckPasses) {
    const auto r = check_table(table(), 0);
    EXPECT_TRUE(r.f_zero_ok);
    EXPECT_TRUE(r.positive);
    EXPECT_TRUE(r.monotone);
}

TEST_F(TableTest, InterpolationAccuracy) {
    std::mt19937_64 rng(24);
    double worst = 0;
    for (int t = 0; t < 500; ++t) {
        const Vec4 l = random_scales(rng, table().lambda_max());
        worst = std::max(worst, std::fabs(table().f(l) / oracle::bingham_f(l) - 1.0));
    }
    EXPECT_LT(worst, 1e-2);
}

TEST_F(TableTest, MonotoneAlongNodeLinesBetweenNodes) {
    const auto& t = table();
    for (double b : {0.0, 7.0, 40.0}) {
        double prev = t.f({0, b, 0, 0});
        for (int s = 1; s <= 400; ++s) {
            const double cur = t.f({t.lambda_max() * s / 400.0, b, 0, 0});
            EXPECT_LE(cur, prev * (1 + 1e-14));
            prev = cur;
        }
    }
}

TEST_F(TableTest, ShiftAndPermutationAtLookup) {
    const auto& t = table();
    const Vec4 l{30, 12, 4, 0};
    EXPECT_NEAR(t.log_f({34, 16, 8, 4}), t.log_f(l) - 4, 1e-12);
    EXPECT_NEAR(t.log_f({4, 30, 0, 12}), t.log_f(l), 1e-12);
}

TEST_F(TableTest, OutOfRange) {
    try {
        table().f({10, 150, 0, 0});
        FAIL();
    } catch (const RangeError& e) {
        EXPECT_EQ(e.coordinate(), 1);
    }
}

TEST_F(TableTest, SerializationRoundTrip) {
    std::stringstream ss;
    table().save(ss);
    const auto back = NormalizerTable::load(ss);
    EXPECT_EQ(back, table());
    EXPECT_EQ(back.provenance(), table().provenance());
    std::stringstream bad("not a table\n");
    EXPECT_THROW(NormalizerTable::load(bad), ParseError);
}

TEST(TableBuild, SerialAndParallelAgree) {
    const auto a = build_table(20, 8, {.quadrature_nodes = 48, .parallel = false});
    const auto b = build_table(20, 8, {.quadrature_nodes = 48, .parallel = true});
    EXPECT_EQ(a, b);
    EXPECT_THROW(build_table(20, 7), std::invalid_argument);
}

TEST(Kernels, PairwiseSumIsExactOnIntegers) {
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    EXPECT_EQ(kernels::pairwise_sum(v), 499500.0);
}
