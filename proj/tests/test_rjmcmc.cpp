#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>
#include <random>

#include "odfmix/rjmcmc.hpp"

using namespace odfmix;

namespace {
UnitQuaternion random_quat(Rng& rng) {
    std::normal_distribution<double> n;
    return UnitQuaternion::normalize(n(rng), n(rng), n(rng), n(rng));
}

Dataset uniform_dataset(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Dataset d{{}, symmetry_group("cubic-24"), symmetry_group("cyclic-2"), "test"};
    for (std::size_t i = 0; i < n; ++i) d.observations.push_back(random_quat(rng));
    return d;
}

MixtureState random_state(std::size_t M, Rng& rng, bool forced = false) {
    std::gamma_distribution<double> gam(1.0);
    std::exponential_distribution<double> ex(0.1);
    MixtureState s;
    s.forced_uniform = forced;
    double tot = 0.0;
    for (std::size_t m = 0; m < M; ++m) tot += s.alpha.emplace_back(gam(rng));
    for (double& a : s.alpha) a /= tot;
    for (std::size_t m = 0; m < M; ++m) {
        std::array<double, 3> l{ex(rng), ex(rng), ex(rng)};
        std::sort(l.begin(), l.end(), std::greater<>());
        const bool u = forced && m + 1 == M;
        s.components.emplace_back(u ? Vec4{0, 0, 0, 0} : Vec4{l[0], l[1], l[2], 0}, random_quat(rng));
    }
    return s;
}

ModalOrientations some_modes(std::size_t k, Rng& rng) {
    ModalOrientations m;
    for (std::size_t i = 0; i < k; ++i) m.g_bar.push_back(random_quat(rng));
    return m;
}

// Kolmogorov distance of a sample to the law of the largest of three Exp(mean mu).
double ks_max_of_three(std::vector<double> x, double mu) {
    std::sort(x.begin(), x.end());
    double d = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double F = std::pow(1.0 - std::exp(-x[i] / mu), 3);
        d = std::max({d, std::fabs(F - i / n), std::fabs(F - (i + 1) / n)});
    }
    return d;
}
}  // namespace

TEST(Transition, PaperRows) {
    const auto P = default_transition_matrix(5);
    EXPECT_EQ(P.at(1, 1), 0.7);
    EXPECT_EQ(P.at(1, 2), 0.3);
    EXPECT_EQ(P.at(2, 1), 0.15);
    EXPECT_EQ(P.at(2, 3), 0.15);
    EXPECT_EQ(P.at(2, 2), 0.7);
    EXPECT_EQ(P.at(5, 4), 0.3);
    EXPECT_EQ(P.at(1, 3), 0.0);
    for (std::size_t mmax = 1; mmax <= 7; ++mmax) {
        const auto Q = default_transition_matrix(mmax);
        for (std::size_t i = 1; i <= mmax; ++i) {
            double s = 0.0;
            for (std::size_t j = 1; j <= mmax; ++j) s += Q.at(i, j);
            EXPECT_NEAR(s, 1.0, 1e-12);
        }
    }
    EXPECT_EQ(default_transition_matrix(1).at(1, 1), 1.0);
}

TEST(Transition, ProposalFrequencies) {
    const auto P = default_transition_matrix(3);
    Rng rng(1);
    std::array<int, 4> c{};
    for (int t = 0; t < 100000; ++t) ++c[P.propose(2, rng)];
    EXPECT_NEAR(c[1] / 1e5, 0.15, 0.005);
    EXPECT_NEAR(c[2] / 1e5, 0.70, 0.005);
    EXPECT_NEAR(c[3] / 1e5, 0.15, 0.005);
}

TEST(DeathMap, Examples) {
    MixtureState tie{{0.5, 0.5}, {BinghamComponent(), BinghamComponent({3, 2, 1, 0}, UnitQuaternion::identity())}, false};
    auto r = death_map(tie);
    EXPECT_EQ(r.removed, 0u);
    EXPECT_EQ(r.state.alpha, std::vector<double>{1.0});
    EXPECT_EQ(r.state.components[0].lambda()[0], 3.0);

    MixtureState three{{0.6, 0.3, 0.1}, {BinghamComponent(), BinghamComponent(), BinghamComponent()}, false};
    r = death_map(three);
    EXPECT_EQ(r.removed, 2u);
    EXPECT_NEAR(r.state.alpha[0], 0.65, 1e-15);
    EXPECT_NEAR(r.state.alpha[1], 0.35, 1e-15);

    EXPECT_THROW(death_map(MixtureState::uniform(UnitQuaternion::identity())), ContractViolation);
}

TEST(DeathMap, ForcedUniformNeverRemoved) {
    MixtureState s{{0.7, 0.3}, {BinghamComponent({4, 1, 0, 0}, UnitQuaternion::identity()), BinghamComponent()}, true};
    s.alpha = {0.8, 0.2};
    const auto r = death_map(s);
    EXPECT_EQ(r.removed, 0u);
    EXPECT_TRUE(r.state.components[0].is_uniform());
}

TEST(DeathMap, WeightsStayOnSimplex) {
    Rng rng(2);
    std::uniform_int_distribution<std::size_t> pickM(2, 6);
    for (int t = 0; t < 1000; ++t) {
        const auto s = random_state(pickM(rng), rng);
        const auto r = death_map(s);
        ASSERT_NO_THROW(r.state.validate(6));
        EXPECT_EQ(r.state.M() + 1, s.M());
    }
}

TEST(BirthMap, HandTracedExample) {
    Rng rng(3);
    const auto modes = some_modes(3, rng);
    const auto s = MixtureState::uniform(modes.g_bar[0]);
    const auto c = birth_map(s, modes, 0.4);
    ASSERT_EQ(c.M(), 2u);
    EXPECT_NEAR(c.alpha[0], 0.6, 1e-15);
    EXPECT_NEAR(c.alpha[1], 0.4, 1e-15);
    EXPECT_TRUE(c.components[1].is_uniform());
    EXPECT_EQ(c.components[1].V(), quaternion_frame(modes.g_bar[1]));
}

TEST(BirthMap, UniformBirthLeavesUniformDensity) {
    Rng rng(4);
    const auto modes = some_modes(3, rng);
    const auto qc = symmetry_group("cubic-24"), qs = symmetry_group("cyclic-2");
    const auto s = MixtureState::uniform(modes.g_bar[0]);
    const auto c = birth_map(s, modes, 0.77);
    for (int t = 0; t < 10; ++t) {
        const auto g = random_quat(rng);
        EXPECT_NEAR(sbm_logpdf(g, c, qc, qs, default_table()), sbm_logpdf(g, s, qc, qs, default_table()), 1e-12);
    }
}

TEST(BirthMap, WeightsStayOnSimplex) {
    Rng rng(5);
    const auto modes = some_modes(6, rng);
    std::uniform_int_distribution<std::size_t> pickM(1, 5);
    std::uniform_real_distribution<double> unif;
    for (int t = 0; t < 1000; ++t) {
        const bool forced = t % 2 == 1;
        const auto s = random_state(pickM(rng) + (forced ? 0 : 0), rng, forced);
        const auto c = birth_map(s, modes, unif(rng));
        ASSERT_NO_THROW(c.validate(6));
        const double smallest = *std::min_element(c.alpha.begin(), c.alpha.end());
        const std::size_t born = forced ? c.M() - 2 : c.M() - 1;
        EXPECT_EQ(c.alpha[born], smallest);
        EXPECT_TRUE(c.components[born].is_uniform());
        if (forced) EXPECT_TRUE(c.components.back().is_uniform());
    }
    EXPECT_THROW(birth_map(random_state(6, rng), modes, 0.5), ContractViolation);
}

TEST(CorrectedBirth, DeathInvertsBirth) {
    Rng rng(6);
    std::uniform_int_distribution<std::size_t> pickM(1, 4);
    std::uniform_real_distribution<double> unif;
    for (int t = 0; t < 1000; ++t) {
        const bool forced = t % 3 == 0;
        const auto s = random_state(pickM(rng) + (forced ? 1 : 0), rng, forced);
        const double w = birth_weight_bound(s) * unif(rng);
        const BinghamComponent comp({7, 3, 1, 0}, random_quat(rng));
        const auto c = birth_insert(s, w, comp);
        ASSERT_NO_THROW(c.validate(6));
        const auto back = death_map(c);
        EXPECT_EQ(back.removed, s.free_count());
        ASSERT_EQ(back.state.M(), s.M());
        for (std::size_t m = 0; m < s.M(); ++m) {
            EXPECT_NEAR(back.state.alpha[m], s.alpha[m], 1e-14);
            EXPECT_EQ(back.state.components[m], s.components[m]);
        }
    }
}

TEST(CorrectedBirth, ProposalDensityMatchesSampler) {
    // E_q[p / q] = 1 for the prior density p when draws come from q; the ratio
    // is bounded by 2 because half of q is the prior itself.
    Rng rng(7);
    const auto modes = some_modes(3, rng);
    Hyperparams h;
    const ComponentProposal prop(modes, h);
    double acc = 0.0, acc2 = 0.0;
    const int n = 200000;
    for (int t = 0; t < n; ++t) {
        const auto c = prop.sample(rng);
        const double lp = log_ordered_exponential(c.lambda(), h.mu) - std::log(2 * M_PI * M_PI);
        const double r = std::exp(lp - prop.log_density(c));
        ASSERT_LE(r, 2.0 + 1e-12);
        acc += r;
        acc2 += r * r;
    }
    const double mean = acc / n, se = std::sqrt((acc2 / n - mean * mean) / n);
    EXPECT_NEAR(mean, 1.0, 4 * se);
}

TEST(Accept, DimensionIdentityAndHandComputation) {
    const auto d = uniform_dataset(25, 8);
    Hyperparams h;
    const auto P = default_transition_matrix(h.M_max);
    Rng rng(9);
    const auto cur = MixtureState::uniform(UnitQuaternion::identity());
    EXPECT_EQ(accept_dimension(d, cur, cur, h, default_table(), P), 1.0);

    const auto modes = some_modes(5, rng);
    const auto can = birth_map(cur, modes, 0.3);
    // both states are uniform: only the prior and proposal ratios remain
    const double per_comp = std::log(6.0) - 3 * std::log(h.mu) - std::log(2 * M_PI * M_PI);
    const double lr = per_comp + std::log(0.15) - std::log(0.3);  // pmf(2)/pmf(1) = nu = 1
    EXPECT_NEAR(accept_dimension(d, cur, can, h, default_table(), P), std::min(1.0, std::exp(lr)), 1e-12);
}

TEST(Accept, WithinMatchesBruteForce) {
    const auto d = uniform_dataset(30, 10);
    Hyperparams h;
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
        const auto a = random_state(2, rng), b = random_state(2, rng);
        const double expected = std::exp(std::min(0.0, log_posterior(d, b, h, default_table()) -
                                                           log_posterior(d, a, h, default_table())));
        EXPECT_NEAR(accept_within(d, a, b, h, default_table()), expected, 1e-10);
        EXPECT_EQ(accept_within(d, a, a, h, default_table()), 1.0);
    }
}

TEST(Proposals, WeightsLimitsAndSimplex) {
    Rng rng(12);
    const std::vector<double> a{0.2, 0.5, 0.3};
    for (auto norm : {WeightsNormalization::Cumulative, WeightsNormalization::Literal}) {
        const auto tiny = propose_weights_literal(a, 1e-30, norm, rng);
        ASSERT_TRUE(tiny);
        for (int i = 0; i < 3; ++i) EXPECT_NEAR((*tiny)[i], a[i], 1e-12);
        for (int t = 0; t < 1000; ++t) {
            const auto p = propose_weights_literal(a, 0.05, norm, rng);
            ASSERT_TRUE(p);
            EXPECT_NEAR(std::accumulate(p->begin(), p->end(), 0.0), 1.0, 1e-12);
            EXPECT_GE(*std::min_element(p->begin(), p->end()), 0.0);
        }
    }
    EXPECT_EQ(propose_weights_literal({1.0}, 0.1, WeightsNormalization::Cumulative, rng), std::vector<double>{1.0});
    for (int t = 0; t < 1000; ++t) {
        const auto p = propose_weights_reflected(a, 0.5, rng);
        EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
        EXPECT_GE(*std::min_element(p.begin(), p.end()), 0.0);
    }
    const auto still = propose_weights_reflected(a, 1e-30, rng);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(still[i], a[i], 1e-12);
}

TEST(Proposals, LiteralWeightsRetryExhaustion) {
    Rng rng(13);
    // huge noise on ten weights: nonnegativity is essentially never met
    const std::vector<double> a(10, 0.1);
    EXPECT_FALSE(propose_weights_literal(a, 100.0, WeightsNormalization::Cumulative, rng, 5));
}

TEST(Proposals, WeightProposalSymmetry) {
    // Forward and backward transition densities between two interior states,
    // estimated by counting draws in a small cube around the target.
    const std::vector<double> a{0.3, 0.3, 0.4}, b{0.32, 0.29, 0.39};
    auto count = [](const std::vector<double>& from, const std::vector<double>& to, bool reflected) {
        Rng rng(reflected ? 14 : 15);
        int hits = 0;
        for (int t = 0; t < 400000; ++t) {
            const auto p = reflected ? propose_weights_reflected(from, 0.01, rng)
                                     : *propose_weights_literal(from, 0.01, WeightsNormalization::Cumulative, rng);
            if (std::fabs(p[0] - to[0]) < 0.01 && std::fabs(p[0] + p[1] - to[0] - to[1]) < 0.01) ++hits;
        }
        return hits;
    };
    for (bool reflected : {true, false}) {
        const int f = count(a, b, reflected), r = count(b, a, reflected);
        EXPECT_GT(f, 1000);
        EXPECT_LT(std::fabs(f - r), 4.0 * std::sqrt(f + r)) << "reflected=" << reflected;
    }
}

TEST(Proposals, OrientationStepLimitsAndFrame) {
    Rng rng(16);
    const BinghamComponent c({5, 3, 1, 0}, random_quat(rng));
    const auto same = propose_orientation(c, 1e-30, rng);
    for (int d = 0; d < 4; ++d)
        for (int i = 0; i < 4; ++i) EXPECT_NEAR(same.V()[d][i], c.V()[d][i], 1e-12);
    for (int t = 0; t < 200; ++t) {
        const auto p = propose_orientation(c, 0.1, rng);
        EXPECT_EQ(p.lambda(), c.lambda());
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) EXPECT_NEAR(dot(p.V()[a], p.V()[b]), a == b ? 1.0 : 0.0, 1e-12);
    }
}

TEST(Proposals, RotationAngleMatchesRejectionOracle) {
    // Oracle: rejection sampling of N((1,0,0,0), d I) from a bounding box.
    const double d = 0.02, sd = std::sqrt(d);
    const std::size_t n = 20000;
    Rng rng(17), orng(18);
    std::vector<double> lib(n), ref;
    for (auto& w : lib) w = random_rotation_near_identity(d, rng).angle();
    std::uniform_real_distribution<double> box(-6 * sd, 6 * sd), unif;
    while (ref.size() < n) {
        const std::array<double, 4> x{1 + box(orng), box(orng), box(orng), box(orng)};
        double r2 = (x[0] - 1) * (x[0] - 1) + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
        if (unif(orng) >= std::exp(-r2 / (2 * d))) continue;
        const double nrm = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
        ref.push_back(2 * std::acos(std::min(1.0, std::fabs(x[0]) / nrm)));
    }
    std::sort(lib.begin(), lib.end());
    std::sort(ref.begin(), ref.end());
    double D = 0.0;
    std::size_t i = 0, j = 0;
    while (i < n && j < n) {
        if (lib[i] <= ref[j]) ++i;
        else ++j;
        D = std::max(D, std::fabs(double(i) / n - double(j) / n));
    }
    EXPECT_LT(D, 1.63 * std::sqrt(2.0 / n));
}

TEST(Proposals, ScalesLimitsAndOrdering) {
    Rng rng(19);
    const BinghamComponent c({5, 3, 1, 0}, random_quat(rng));
    const auto tiny = propose_scales_literal(c, 1e-30, rng);
    ASSERT_TRUE(tiny);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(tiny->lambda()[i], c.lambda()[i], 1e-12);
    for (int t = 0; t < 1000; ++t) {
        const auto p = propose_scales_literal(c, 4.0, rng);
        ASSERT_TRUE(p);
        EXPECT_NO_THROW(validate_scales(p->lambda()));
        EXPECT_NO_THROW(validate_scales(propose_scales_reflected(c, 4.0, rng).lambda()));
    }
}

TEST(Modal, IdenticalDataGiveCanonicalPoint) {
    Rng rng(20);
    const auto qc = symmetry_group("cubic-24"), qs = symmetry_group("cyclic-2");
    const auto g = random_quat(rng);
    Dataset d{{}, qc, qs, "test"};
    for (int i = 0; i < 50; ++i) d.observations.push_back(qc[i % 24] * g * qs[i % 2]);
    const auto m = modal_orientations(d, 3);
    ASSERT_EQ(m.g_bar.size(), 3u);
    for (const auto& q : m.g_bar) EXPECT_TRUE(same_rotation(q, canonicalize(g, qc, qs), 1e-9));
}

TEST(Modal, SeparatedClustersRecoveredAndShuffleInvariant) {
    Rng rng(21);
    const auto qc = symmetry_group("cubic-24"), qs = symmetry_group("identity");
    const auto c1 = UnitQuaternion::axis_angle(1, 2, 3, 0.3), c2 = UnitQuaternion::axis_angle(-2, 1, 0.5, 0.6);
    Dataset d{{}, qc, qs, "test"};
    for (int i = 0; i < 300; ++i) {
        const auto center = i % 3 == 0 ? c2 : c1;  // c1 is the larger cluster
        d.observations.push_back(qc[i % 24] * center * random_rotation_near_identity(1e-4, rng));
    }
    const auto m = modal_orientations(d, 2);
    const double deg = M_PI / 180.0;
    EXPECT_LT(symmetric_distance(m.g_bar[0], c1, qc, qs), 5 * deg);
    EXPECT_LT(symmetric_distance(m.g_bar[1], c2, qc, qs), 5 * deg);

    Dataset shuffled = d;
    std::shuffle(shuffled.observations.begin(), shuffled.observations.end(), rng);
    const auto m2 = modal_orientations(shuffled, 2);
    EXPECT_EQ(m.g_bar, m2.g_bar);
    EXPECT_THROW(modal_orientations(d, 301), ContractViolation);
}

TEST(Run, ZeroIterationsGivesInitialState) {
    const auto d = uniform_dataset(20, 22);
    Hyperparams h;
    SamplerConfig cfg;
    cfg.n_iters = 0;
    const auto tr = run(d, h, cfg, default_table());
    EXPECT_TRUE(tr.records.empty());
    ASSERT_EQ(tr.initial.M(), 1u);
    EXPECT_TRUE(tr.initial.components[0].is_uniform());
    EXPECT_EQ(tr.initial.alpha, std::vector<double>{1.0});
    const auto modes = modal_orientations(d, h.M_max);
    EXPECT_EQ(tr.initial.components[0].v1(), modes.g_bar[0]);
}

TEST(Run, TraceLengthAdaptationFreezeAndDeterminism) {
    const auto d = uniform_dataset(120, 23);
    Hyperparams h{10, 1, 1, 3};
    SamplerConfig cfg;
    cfg.n_iters = 700;
    cfg.burn_in = 300;
    cfg.thin = 4;
    cfg.seed = 99;
    const auto a = run(d, h, cfg, default_table());
    EXPECT_EQ(a.records.size(), (700u - 300u) / 4u);
    ASSERT_EQ(a.adaptation.size(), 3u);
    EXPECT_EQ(a.adaptation.back().iter, 300u);
    EXPECT_EQ(a.final_tuning, a.adaptation.back().tuning);
    for (const auto& r : a.records) {
        EXPECT_NO_THROW(r.state.validate(h.M_max));
        EXPECT_TRUE(std::isfinite(r.log_posterior));
        EXPECT_NEAR(r.log_posterior, log_posterior(d, r.state, h, default_table()), 1e-8);
    }
    const auto b = run(d, h, cfg, default_table());
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].state, b.records[i].state);
        EXPECT_EQ(a.records[i].log_posterior, b.records[i].log_posterior);
    }
}

TEST(Run, SerialAndParallelKernelsAgree) {
    const auto d = uniform_dataset(150, 24);
    Hyperparams h{10, 1, 1, 3};
    SamplerConfig cfg;
    cfg.n_iters = 200;
    cfg.burn_in = 100;
    cfg.parallel = false;
    const auto a = run(d, h, cfg, default_table());
    cfg.parallel = true;
    const auto b = run(d, h, cfg, default_table());
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].state, b.records[i].state);
}

TEST(Run, ForcedUniformStaysUniform) {
    const auto d = uniform_dataset(100, 25);
    Hyperparams h{10, 1, 1, 3};
    for (auto moves : {MoveSet::Corrected, MoveSet::Literal}) {
        SamplerConfig cfg;
        cfg.n_iters = 400;
        cfg.burn_in = 100;
        cfg.forced_uniform = true;
        cfg.moves = moves;
        const auto tr = run(d, h, cfg, default_table());
        for (const auto& r : tr.records) {
            EXPECT_TRUE(r.state.forced_uniform);
            EXPECT_TRUE(r.state.components.back().is_uniform());
        }
    }
}

TEST(Run, LiteralMovesKeepInvariants) {
    const auto d = uniform_dataset(100, 26);
    Hyperparams h{10, 1, 1, 3};
    SamplerConfig cfg;
    cfg.n_iters = 500;
    cfg.burn_in = 200;
    cfg.moves = MoveSet::Literal;
    for (auto norm : {WeightsNormalization::Cumulative, WeightsNormalization::Literal}) {
        cfg.weights_normalization = norm;
        const auto tr = run(d, h, cfg, default_table());
        for (const auto& r : tr.records) EXPECT_NO_THROW(r.state.validate(h.M_max));
    }
}

TEST(Run, ConfigValidation) {
    SamplerConfig cfg;
    cfg.n_iters = 10;
    cfg.burn_in = 10;
    EXPECT_THROW(cfg.validate(), ContractViolation);
    cfg.burn_in = 0;
    cfg.b = 0;
    EXPECT_THROW(cfg.validate(), ContractViolation);
}

TEST(Chain, CachedPosteriorMatchesRecomputation) {
    const auto d = uniform_dataset(80, 27);
    Hyperparams h{10, 1.5, 1, 4};
    SamplerConfig cfg;
    const LikelihoodEvaluator lik(d, default_table());
    const auto modes = modal_orientations(d, h.M_max);
    Chain chain(&lik, h, cfg, modes, 0.6, Rng(5));
    chain.set_adapting(true);
    for (int i = 0; i < 300; ++i) {
        chain.step();
        if (i % 50 == 0) EXPECT_NEAR(chain.log_posterior(), chain.recompute_log_posterior(), 1e-8);
    }
}

// Prior-only chain: saved states must follow the prior. Samples are thinned
// so the chi-square and KS thresholds apply to nearly independent draws.
TEST(PriorRecovery, CorrectedMovesReproducePrior) {
    const auto d = uniform_dataset(10, 28);
    Hyperparams h{10, 1, 1, 4};
    SamplerConfig cfg;
    cfg.likelihood = false;
    cfg.n_iters = 42000;
    cfg.burn_in = 2000;
    cfg.thin = 10;
    cfg.seed = 7;
    const auto tr = run(d, h, cfg, NormalizerTable(100.0, 2, std::vector<double>(8, 1.0)));
    std::vector<std::size_t> counts(h.M_max, 0);
    std::vector<double> l1;
    for (const auto& r : tr.records) {
        ++counts[r.state.M() - 1];
        for (const auto& c : r.state.components) l1.push_back(c.lambda()[0]);
    }
    double chi2 = 0.0;
    const double n = static_cast<double>(tr.records.size());
    for (std::size_t m = 1; m <= h.M_max; ++m) {
        const double e = n * std::exp(log_pmf_components(m, h));
        chi2 += std::pow(counts[m - 1] - e, 2) / e;
    }
    const boost::math::chi_squared dist(static_cast<double>(h.M_max - 1));
    EXPECT_GT(1.0 - boost::math::cdf(dist, chi2), 0.01) << "chi2 = " << chi2;
    const double mean = std::accumulate(l1.begin(), l1.end(), 0.0) / l1.size();
    EXPECT_NEAR(mean, h.mu * 11.0 / 6.0, 0.05 * h.mu * 11.0 / 6.0);
    EXPECT_LT(ks_max_of_three(l1, h.mu), 0.05);
}
