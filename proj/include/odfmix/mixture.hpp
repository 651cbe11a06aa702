#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "odfmix/bingham.hpp"
#include "odfmix/kernels.hpp"
#include "odfmix/normalizer.hpp"
#include "odfmix/symmetry.hpp"

namespace odfmix {

/// Prior hyperparameters: exponential mean mu for the scales, Dirichlet
/// concentration beta, Poisson rate nu for M - 1 and the cap M_max.
struct Hyperparams {
    double mu = 10.0;
    double beta = 1.0;
    double nu = 1.0;
    std::size_t M_max = 5;

    /// Throws ContractViolation listing the first bad field.
    void validate() const;
};

/// M weighted components. With forced_uniform the last component is the
/// uniform density and never leaves the mixture.
struct MixtureState {
    std::vector<double> alpha;
    std::vector<BinghamComponent> components;
    bool forced_uniform = false;

    std::size_t M() const { return components.size(); }
    /// Components that carry free parameters (all but a forced uniform one).
    std::size_t free_count() const { return forced_uniform ? M() - 1 : M(); }
    bool is_free(std::size_t m) const { return !forced_uniform || m + 1 < M(); }

    /// The single-component uniform start state with v1 = modal orientation.
    static MixtureState uniform(const UnitQuaternion& v1, bool forced_uniform = false);

    /// Checks every invariant (M in [1, M_max], weights on the simplex to 1e-12,
    /// ordered scales, orthonormal frames, the forced component uniform).
    /// Throws ContractViolation.
    void validate(std::size_t M_max) const;

    bool operator==(const MixtureState&) const = default;
};

struct Dataset {
    std::vector<UnitQuaternion> observations;
    SymmetryGroup qc;
    SymmetryGroup qs;
    std::string source;  ///< provenance, e.g. the file it came from

    std::size_t size() const { return observations.size(); }
};

/// log sum_m alpha_m SB(g | component m), evaluated literally from sb_logpdf.
double sbm_logpdf(const UnitQuaternion& g, const MixtureState& state, const SymmetryGroup& qc,
                  const SymmetryGroup& qs, const NormalizerTable& table);

/// Sum of sbm_logpdf over the data (pairwise summation).
double loglik(const Dataset& data, const MixtureState& state, const NormalizerTable& table);

/// Truncated shifted Poisson: P(M) proportional to nu^(M-1) / (M-1)! on 1..M_max.
double log_pmf_components(std::size_t M, const Hyperparams& h);

/// Ordered-exponential density of (lambda1, lambda2, lambda3) with mean mu.
double log_ordered_exponential(const Vec4& lambda, double mu);

/// Full normalized log prior (scales, orientations, weights, M).
double log_prior(const MixtureState& state, const Hyperparams& h);

double log_posterior(const Dataset& data, const MixtureState& state, const Hyperparams& h,
                     const NormalizerTable& table);

/// One draw from the prior.
MixtureState sample_prior(const Hyperparams& h, Rng& rng, bool forced_uniform = false);

/// Fast likelihood in the layout the sampler uses: per-component columns of
/// log SB values, combined row-wise with the weights. Uses
/// (qc v qs) . g = v . (qc^-1 g qs^-1) to evaluate all symmetric copies with
/// one packed quadratic form per component.
/// Immutable after construction; safe to share between threads.
class LikelihoodEvaluator {
public:
    LikelihoodEvaluator(const Dataset& data, const NormalizerTable& table, bool parallel = true);

    std::size_t observations() const { return feats_.observations; }
    const NormalizerTable& table() const { return *table_; }

    /// out[i] = log SB(g_i | comp).
    void column(const BinghamComponent& comp, std::vector<double>& out) const;

    /// sum_i log sum_m alpha_m exp(columns[m][i]).
    double combine(std::span<const std::vector<double>* const> columns,
                   std::span<const double> alpha) const;

    double loglik(const MixtureState& state) const;

private:
    kernels::ClassFeatures feats_;
    const NormalizerTable* table_;
    bool parallel_;
};

}  // namespace odfmix
