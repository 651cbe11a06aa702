#pragma once

#include <vector>

#include "odfmix/rjmcmc.hpp"

namespace odfmix {

/// Strictly decreasing temperatures in (0, 1], the first exactly 1.
class TemperatureLadder {
public:
    /// Throws ContractViolation when the invariants fail.
    explicit TemperatureLadder(std::vector<double> temps);
    /// (1, 0.9, ..., 0.1).
    static TemperatureLadder standard();

    const std::vector<double>& temps() const { return temps_; }
    std::size_t size() const { return temps_.size(); }
    double operator[](std::size_t t) const { return temps_[t]; }

private:
    std::vector<double> temps_;
};

/// Corrected: swap accepted with probability
/// min(1, [pi(x_{t+1}) / pi(x_t)]^(T_t - T_{t+1})). Literal: min(1, pi(x_t) / pi(x_{t+1})).
enum class SwapRule { Corrected, Literal };

/// log of the swap acceptance ratio between rungs t and t + 1 given their
/// untempered log posteriors.
double swap_log_acceptance(double log_post_t, double log_post_t1, double T_t, double T_t1, SwapRule rule);

struct SwapStats {
    std::size_t proposed = 0;
    std::size_t accepted = 0;
    double rate() const { return proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0; }
};

struct RungSummary {
    double temperature = 1.0;
    AcceptanceCounts counts;
    Tuning final_tuning;
};

struct PtResult {
    ChainTrace trace;                ///< the temperature-1 chain
    std::vector<SwapStats> swaps;    ///< entry t: pair (t, t + 1)
    std::vector<RungSummary> rungs;
};

/// Parallel tempering: every rung takes one tempered step (rungs in
/// parallel), then one adjacent pair chosen uniformly proposes a swap of
/// complete states. Only the T = 1 chain is saved. Rung r draws from
/// derive_seed(seed, r); swap decisions use a separate stream, so a one-rung
/// ladder reproduces run() exactly.
PtResult run_pt(const Dataset& data, const Hyperparams& h, const SamplerConfig& config,
                const TemperatureLadder& ladder, SwapRule rule, const NormalizerTable& table,
                const SaveCallback& on_save = {});

}  // namespace odfmix
