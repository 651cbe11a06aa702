#include "odfmix/mixture.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "odfmix/errors.hpp"

namespace odfmix {

namespace {

const double kLogUniform = -std::log(kSphereArea);

double logsumexp(std::span<const double> v) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : v) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

}  // namespace

void Hyperparams::validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ContractViolation("hyperparameter mu must be positive");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ContractViolation("hyperparameter beta must be positive");
    if (!(nu > 0.0) || !std::isfinite(nu)) throw ContractViolation("hyperparameter nu must be positive");
    if (M_max < 1) throw ContractViolation("M_max must be at least 1");
}

MixtureState MixtureState::uniform(const UnitQuaternion& v1, bool forced_uniform) {
    return {{1.0}, {BinghamComponent({0, 0, 0, 0}, v1)}, forced_uniform};
}

void MixtureState::validate(std::size_t M_max) const {
    auto fail = [](const std::string& msg) { throw ContractViolation("invalid mixture state: " + msg); };
    if (components.empty() || components.size() > M_max) fail("M outside [1, M_max]");
    if (alpha.size() != components.size()) fail("weight count differs from component count");
    double sum = 0.0;
    for (double a : alpha) {
        if (!(a >= 0.0 && a <= 1.0)) fail("weight outside [0, 1]");
        sum += a;
    }
    if (std::fabs(sum - 1.0) > 1e-12) fail("weights do not sum to 1");
    for (const auto& c : components) {
        try {
            validate_scales(c.lambda());
            BinghamComponent check(c.lambda(), c.V());
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }
    if (forced_uniform && !components.back().is_uniform()) fail("forced uniform component has nonzero scales");
}

double sbm_logpdf(const UnitQuaternion& g, const MixtureState& state, const SymmetryGroup& qc,
                  const SymmetryGroup& qs, const NormalizerTable& table) {
    std::vector<double> terms;
    for (std::size_t m = 0; m < state.M(); ++m) {
        if (state.alpha[m] <= 0.0) continue;
        terms.push_back(std::log(state.alpha[m]) + sb_logpdf(g, state.components[m], qc, qs, table));
    }
    return logsumexp(terms);
}

double loglik(const Dataset& data, const MixtureState& state, const NormalizerTable& table) {
    std::vector<double> v(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        v[i] = sbm_logpdf(data.observations[i], state, data.qc, data.qs, table);
    return kernels::pairwise_sum(v);
}

double log_pmf_components(std::size_t M, const Hyperparams& h) {
    if (M < 1 || M > h.M_max) return -std::numeric_limits<double>::infinity();
    auto log_term = [&](std::size_t m) {
        return -h.nu + static_cast<double>(m - 1) * std::log(h.nu) - std::lgamma(static_cast<double>(m));
    };
    std::vector<double> all(h.M_max);
    for (std::size_t m = 1; m <= h.M_max; ++m) all[m - 1] = log_term(m);
    return log_term(M) - logsumexp(all);
}

double log_ordered_exponential(const Vec4& l, double mu) {
    return std::log(6.0) - 3.0 * std::log(mu) - (l[0] + l[1] + l[2]) / mu;
}

double log_prior(const MixtureState& state, const Hyperparams& h) {
    const std::size_t M = state.M();
    double lp = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
        if (!state.is_free(m)) continue;
        const Vec4& l = state.components[m].lambda();
        if (!(l[0] >= l[1] && l[1] >= l[2] && l[2] >= 0.0 && l[3] == 0.0))
            throw ContractViolation("log_prior: component scales are not ordered");
        lp += log_ordered_exponential(l, h.mu) + kLogUniform;
    }
    const double Md = static_cast<double>(M);
    lp += std::lgamma(Md * h.beta) - Md * std::lgamma(h.beta);
    if (h.beta != 1.0)
        for (double a : state.alpha) lp += (h.beta - 1.0) * std::log(a);
    lp += log_pmf_components(M, h);
    return lp;
}

double log_posterior(const Dataset& data, const MixtureState& state, const Hyperparams& h,
                     const NormalizerTable& table) {
    return loglik(data, state, table) + log_prior(state, h);
}

MixtureState sample_prior(const Hyperparams& h, Rng& rng, bool forced_uniform) {
    std::vector<double> pmf(h.M_max);
    for (std::size_t m = 1; m <= h.M_max; ++m) pmf[m - 1] = std::exp(log_pmf_components(m, h));
    std::discrete_distribution<std::size_t> pick(pmf.begin(), pmf.end());
    const std::size_t M = pick(rng) + 1;

    std::gamma_distribution<double> gamma(h.beta, 1.0);
    std::vector<double> alpha(M);
    double total = 0.0;
    do {
        total = 0.0;
        for (double& a : alpha) total += (a = gamma(rng));
    } while (!(total > 0.0));
    for (double& a : alpha) a /= total;

    std::exponential_distribution<double> expo(1.0 / h.mu);
    MixtureState s;
    s.forced_uniform = forced_uniform;
    s.alpha = std::move(alpha);
    for (std::size_t m = 0; m < M; ++m) {
        std::array<double, 3> l{expo(rng), expo(rng), expo(rng)};
        std::sort(l.begin(), l.end(), std::greater<>());
        const UnitQuaternion v1 = sample_uniform(rng);
        const bool uniform = forced_uniform && m + 1 == M;
        s.components.emplace_back(uniform ? Vec4{0, 0, 0, 0} : Vec4{l[0], l[1], l[2], 0.0}, v1);
    }
    return s;
}

LikelihoodEvaluator::LikelihoodEvaluator(const Dataset& data, const NormalizerTable& table, bool parallel)
    : table_(&table), parallel_(parallel) {
    const std::size_t J = data.qc.size(), K = data.qs.size();
    feats_.observations = data.size();
    feats_.members = J * K;
    feats_.data.resize(feats_.observations * 4 * feats_.members);
    for (std::size_t i = 0; i < data.size(); ++i)
        for (std::size_t j = 0; j < J; ++j)
            for (std::size_t k = 0; k < K; ++k)
                feats_.set(i, j * K + k,
                           hamilton(hamilton(data.qc[j].conj().vec(), data.observations[i].vec()),
                                    data.qs[k].conj().vec()));
}

void LikelihoodEvaluator::column(const BinghamComponent& comp, std::vector<double>& out) const {
    out.resize(feats_.observations);
    const double log_f = table_->log_f(comp.lambda());
    if (comp.is_uniform()) {
        std::fill(out.begin(), out.end(), -log_f);
        return;
    }
    const auto A = kernels::pack_quadratic(comp.lambda(), comp.V());
    const double log_norm = -log_f - std::log(static_cast<double>(feats_.members));
    if (parallel_)
        kernels::omp::log_sb_column(feats_, A, log_norm, out);
    else
        kernels::serial::log_sb_column(feats_, A, log_norm, out);
}

double LikelihoodEvaluator::combine(std::span<const std::vector<double>* const> columns,
                                    std::span<const double> alpha) const {
    thread_local std::vector<double> rows;
    thread_local std::vector<double> log_alpha;
    rows.resize(feats_.observations);
    log_alpha.resize(alpha.size());
    for (std::size_t m = 0; m < alpha.size(); ++m)
        log_alpha[m] = alpha[m] > 0.0 ? std::log(alpha[m]) : -std::numeric_limits<double>::infinity();
    if (parallel_)
        kernels::omp::mixture_rows(columns, log_alpha, rows);
    else
        kernels::serial::mixture_rows(columns, log_alpha, rows);
    return kernels::pairwise_sum(rows);
}

double LikelihoodEvaluator::loglik(const MixtureState& state) const {
    std::vector<std::vector<double>> cols(state.M());
    std::vector<const std::vector<double>*> ptrs;
    for (std::size_t m = 0; m < state.M(); ++m) {
        column(state.components[m], cols[m]);
        ptrs.push_back(&cols[m]);
    }
    return combine(ptrs, state.alpha);
}

}  // namespace odfmix
