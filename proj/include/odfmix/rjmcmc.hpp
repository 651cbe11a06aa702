#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "odfmix/mixture.hpp"

namespace odfmix {

/// Which dimension-changing and within-dimension moves the sampler uses.
///  - Corrected: birth is the exact inverse of the death map (weight drawn
///    uniformly, new component drawn from a proposal whose density enters
///    the acceptance ratio); within moves are reflected random walks updated
///    block by block.
///  - Literal: cumulative-insertion birth of a uniform component, acceptance
///    without proposal densities, truncated-resampling proposals and one
///    joint within-dimension accept.
enum class MoveSet { Corrected, Literal };

/// Final normalization of the perturbed cumulative weights in literal moves.
enum class WeightsNormalization { Cumulative, Literal };

struct SamplerConfig {
    std::size_t n_iters = 1000;
    std::size_t burn_in = 0;
    std::size_t thin = 1;
    double b = 1e-3;  ///< weight proposal variance
    double c = 1.0;   ///< scale proposal variance
    double d = 1e-3;  ///< orientation proposal variance
    std::uint64_t seed = 1;
    bool adapt = true;
    std::size_t adapt_window = 100;
    double adapt_gain = 0.5;
    double target_rate = 0.25;
    bool likelihood = true;  ///< false: the chain targets the prior only
    bool forced_uniform = false;
    MoveSet moves = MoveSet::Corrected;
    WeightsNormalization weights_normalization = WeightsNormalization::Cumulative;
    std::size_t max_retries = 1000;  ///< literal resampling proposals
    bool parallel = true;            ///< OpenMP kernels for the likelihood

    /// Throws ContractViolation.
    void validate() const;
};

/// Row-stochastic proposal matrix over M in 1..M_max (1-based accessors).
class TransitionMatrix {
public:
    explicit TransitionMatrix(std::size_t M_max);
    std::size_t M_max() const { return M_max_; }
    double at(std::size_t from, std::size_t to) const;
    std::size_t propose(std::size_t from, Rng& rng) const;

private:
    std::size_t M_max_;
    std::vector<double> p_;
};

TransitionMatrix default_transition_matrix(std::size_t M_max);

/// Modal orientations g_bar_1..g_bar_{M_max} ordered by cluster size.
struct ModalOrientations {
    std::vector<UnitQuaternion> g_bar;
};

/// Spherical k-means (distance 1 - |dot|) on canonicalized data, 10 restarts,
/// k-means++ seeding from a hash of the sorted data. Requires n >= M_max.
ModalOrientations modal_orientations(const Dataset& data, std::size_t M_max);

struct DeathResult {
    MixtureState state;
    std::size_t removed;  ///< index of the removed component
};

/// Removes the smallest-weight free component (lowest index on ties) and
/// spreads its weight equally over the M - 1 survivors.
DeathResult death_map(const MixtureState& state);

/// Literal birth: inserts u into the cumulative weights, differences, puts the
/// smallest weight on the new uniform component with V = frame(g_bar_{M+1}).
MixtureState birth_map(const MixtureState& state, const ModalOrientations& modes, double u);

/// Largest weight the corrected birth can give the new component so that the
/// death map inverts it.
double birth_weight_bound(const MixtureState& state);

/// Corrected birth: the new component takes weight w and every existing
/// weight loses w / M. The new component is placed last among the free ones.
MixtureState birth_insert(const MixtureState& state, double w, const BinghamComponent& comp);

/// Proposal for new components in corrected births: with probability 1/2 the
/// prior, otherwise near-uniform scales (ordered exponential, mean 0.5) with
/// v1 from an angular central Gaussian about g_bar_m * k, m uniform (so the
/// mode sits near a modal orientation).
class ComponentProposal {
public:
    ComponentProposal(const ModalOrientations& modes, const Hyperparams& h);
    BinghamComponent sample(Rng& rng) const;
    double log_density(const BinghamComponent& comp) const;

private:
    std::vector<UnitQuaternion> centers_;
    double mu_;
};

/// log acceptance of a dimension move given untempered log posteriors and the
/// log of the move-specific proposal correction (0 for literal moves).
double dimension_log_acceptance(double log_post_cur, double log_post_can, const TransitionMatrix& P,
                                std::size_t M_cur, std::size_t M_can, double temperature,
                                double log_proposal_correction = 0.0);

/// a_M = min(1, exp(dimension_log_acceptance(...))) evaluated on two states.
double accept_dimension(const Dataset& data, const MixtureState& cur, const MixtureState& can,
                        const Hyperparams& h, const NormalizerTable& table, const TransitionMatrix& P);

/// a = min(1, posterior ratio) for two states of equal dimension.
double accept_within(const Dataset& data, const MixtureState& cur, const MixtureState& can,
                     const Hyperparams& h, const NormalizerTable& table);

/// Literal weight proposal: Gaussian step on the cumulative weights,
/// renormalized, resampled until nonnegative. Returns nullopt when
/// max_retries is exhausted.
std::optional<std::vector<double>> propose_weights_literal(const std::vector<double>& alpha, double b,
                                                           WeightsNormalization norm, Rng& rng,
                                                           std::size_t max_retries = 1000);

/// Corrected weight proposal: Gaussian step on the inner cumulative weights
/// reflected into [0, 1] and sorted. Symmetric.
std::vector<double> propose_weights_reflected(const std::vector<double>& alpha, double b, Rng& rng);

/// Normalized draw from N((1,0,0,0), d I4): a random rotation near identity.
UnitQuaternion random_rotation_near_identity(double d, Rng& rng);

/// v1 <- v1 * randRot, frame completed from v1.
BinghamComponent propose_orientation(const BinghamComponent& comp, double d, Rng& rng);

/// Literal scale proposal: Gaussian step resampled until ordered and
/// nonnegative. nullopt after max_retries.
std::optional<BinghamComponent> propose_scales_literal(const BinghamComponent& comp, double c, Rng& rng,
                                                       std::size_t max_retries = 1000);

/// Corrected scale proposal: Gaussian step, absolute value, sorted descending.
/// Symmetric.
BinghamComponent propose_scales_reflected(const BinghamComponent& comp, double c, Rng& rng);

/// Proposal variances, one per component slot for c and d.
struct Tuning {
    double b = 0.0;
    std::vector<double> c;
    std::vector<double> d;
    bool operator==(const Tuning&) const = default;
};

struct AdaptationRecord {
    std::size_t iter = 0;
    Tuning tuning;
};

/// What happened in one iteration.
struct MoveRecord {
    int dimension = 0;  ///< -1 death, 0 none, +1 birth proposed
    bool dimension_accepted = false;
    bool weights_accepted = false;
    std::size_t orientation_accepted = 0;  ///< count over components
    std::size_t scales_accepted = 0;
};

struct TraceRecord {
    std::size_t iter = 0;
    MixtureState state;
    double log_posterior = 0.0;
    MoveRecord moves;
};

struct ChainTrace {
    MixtureState initial;
    std::vector<TraceRecord> records;
    std::vector<AdaptationRecord> adaptation;
    Tuning final_tuning;
};

/// Totals of proposals and acceptances.
struct AcceptanceCounts {
    std::size_t births = 0, births_accepted = 0;
    std::size_t deaths = 0, deaths_accepted = 0;
    std::size_t weights = 0, weights_accepted = 0;
    std::size_t orientations = 0, orientations_accepted = 0;
    std::size_t scales = 0, scales_accepted = 0;
};

/// One RJMCMC chain at a fixed temperature. Owns its state, cached
/// likelihood columns, tuning and RNG stream.
class Chain {
public:
    /// `likelihood` may be null when config.likelihood is false.
    Chain(const LikelihoodEvaluator* likelihood, const Hyperparams& h, const SamplerConfig& config,
          const ModalOrientations& modes, double temperature, Rng rng);

    /// One full iteration: dimension move, then within-dimension moves.
    /// Adapts tuning at the end of each window while adapting() is true.
    MoveRecord step();

    const MixtureState& state() const { return state_; }
    double log_posterior() const { return log_lik_ + log_prior_; }
    double log_likelihood() const { return log_lik_; }
    double temperature() const { return temperature_; }
    const Tuning& tuning() const { return tuning_; }
    const AcceptanceCounts& counts() const { return counts_; }
    const std::vector<AdaptationRecord>& adaptation_history() const { return history_; }
    std::size_t iteration() const { return iter_; }

    bool adapting() const { return adapting_; }
    void set_adapting(bool on) { adapting_ = on; }

    /// Exchanges states (and cached likelihood columns) with another chain;
    /// tuning, temperature and RNG stay with each chain.
    void swap_state(Chain& other);

    /// Recomputes the posterior from scratch (used by tests).
    double recompute_log_posterior() const;

private:
    MoveRecord step_corrected();
    MoveRecord step_literal();
    bool try_birth_corrected();
    bool try_death_corrected();
    bool try_dimension_literal(std::size_t M_can);
    bool accept(double log_ratio);
    double mixture_loglik(const std::vector<std::vector<double>>& cols, const std::vector<double>& alpha) const;
    void column(const BinghamComponent& comp, std::vector<double>& out) const;
    bool in_range(const BinghamComponent& comp) const;
    void adapt();

    const LikelihoodEvaluator* lik_;
    Hyperparams h_;
    SamplerConfig cfg_;
    ModalOrientations modes_;
    TransitionMatrix P_;
    ComponentProposal birth_proposal_;
    double temperature_;
    Rng rng_;
    std::uniform_real_distribution<double> unif_{0.0, 1.0};

    MixtureState state_;
    std::vector<std::vector<double>> cols_;
    double log_lik_ = 0.0;
    double log_prior_ = 0.0;

    Tuning tuning_;
    std::vector<AdaptationRecord> history_;
    bool adapting_ = false;
    std::size_t iter_ = 0;
    AcceptanceCounts counts_;
    // window counters: weights, then per slot orientation and scales
    std::size_t win_w_prop_ = 0, win_w_acc_ = 0;
    std::vector<std::size_t> win_d_prop_, win_d_acc_, win_c_prop_, win_c_acc_;
};

using SaveCallback = std::function<void(const TraceRecord&)>;

/// Algorithm-1 run: n_iters iterations, adaptation during burn-in, every
/// thin-th post-burn-in state saved. on_save (optional) sees each record as
/// it is saved.
ChainTrace run(const Dataset& data, const Hyperparams& h, const SamplerConfig& config,
               const NormalizerTable& table, const SaveCallback& on_save = {});

/// Stream seeds: rung r of a run with seed s uses derive_seed(s, r).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace odfmix
