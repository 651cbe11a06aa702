#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "odfmix/kde.hpp"
#include "odfmix/rjmcmc.hpp"

namespace odfmix {

/// Draws generated per RNG stream; shard s uses derive_seed(ppd seed, s).
inline constexpr std::size_t kPpdShard = 1024;

/// n_new draws from the posterior predictive: per draw a saved state chosen
/// uniformly, a component chosen by its weight, a symmetry pair (j, k)
/// chosen uniformly and a draw from the rotated Bingham. The result depends
/// only on (trace, n_new, seed), not on the thread count.
/// Throws ContractViolation for an empty trace.
std::vector<UnitQuaternion> ppd_sample(const ChainTrace& trace, const SymmetryGroup& qc, const SymmetryGroup& qs,
                                       std::size_t n_new, std::uint64_t seed, bool parallel = true);

/// Fixed kappa, or (nullopt) leave-one-out selection as for the baseline.
struct BandwidthPolicy {
    std::optional<double> kappa;
};

struct PpdDensity {
    KdeEstimator estimator;
    BandwidthSelection selection;  ///< empty scores when the kappa was fixed
};

/// Kernel density estimate built on the posterior predictive draws.
PpdDensity ppd_density(const std::vector<UnitQuaternion>& draws, const SymmetryGroup& qc, const SymmetryGroup& qs,
                       const BandwidthPolicy& policy = {}, bool parallel = true);

/// The saved state with the largest log posterior; ties go to the earliest
/// iteration. Throws ContractViolation for an empty trace.
const TraceRecord& map_estimate(const ChainTrace& trace);

}  // namespace odfmix
