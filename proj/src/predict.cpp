#include "odfmix/predict.hpp"

#include "odfmix/bingham.hpp"
#include "odfmix/errors.hpp"

namespace odfmix {

namespace {

constexpr std::uint64_t kPpdStream = 0x707064;

std::size_t pick_component(const std::vector<double>& alpha, double u) {
    double acc = 0.0;
    for (std::size_t m = 0; m + 1 < alpha.size(); ++m) {
        acc += alpha[m];
        if (u < acc) return m;
    }
    return alpha.size() - 1;
}

}  // namespace

std::vector<UnitQuaternion> ppd_sample(const ChainTrace& trace, const SymmetryGroup& qc, const SymmetryGroup& qs,
                                       std::size_t n_new, std::uint64_t seed, bool parallel) {
    if (trace.records.empty()) throw ContractViolation("posterior predictive sampling needs a non-empty trace");
    const std::uint64_t base = derive_seed(seed, kPpdStream);
    const std::size_t shards = (n_new + kPpdShard - 1) / kPpdShard;
    const auto n_states = trace.records.size();
    std::vector<UnitQuaternion> draws(n_new);
#pragma omp parallel for schedule(dynamic, 1) if (parallel && shards > 1)
    for (std::size_t s = 0; s < shards; ++s) {
        Rng rng(derive_seed(base, s));
        std::uniform_int_distribution<std::size_t> pick_state(0, n_states - 1);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const std::size_t end = std::min(n_new, (s + 1) * kPpdShard);
        for (std::size_t i = s * kPpdShard; i < end; ++i) {
            const MixtureState& st = trace.records[pick_state(rng)].state;
            const std::size_t m = pick_component(st.alpha, unif(rng));
            draws[i] = sample_symmetric_bingham(st.components[m], qc, qs, rng);
        }
    }
    return draws;
}

PpdDensity ppd_density(const std::vector<UnitQuaternion>& draws, const SymmetryGroup& qc, const SymmetryGroup& qs,
                       const BandwidthPolicy& policy, bool parallel) {
    if (draws.empty()) throw ContractViolation("posterior predictive density needs draws");
    BandwidthSelection sel;
    if (policy.kappa) {
        sel.spec = KernelSpec::make(*policy.kappa);
        sel.points_used = draws.size();
    } else {
        Dataset d{draws, qc, qs, "posterior predictive draws"};
        sel = select_bandwidth(d, parallel);
    }
    KdeEstimator est(draws, qc, qs, sel.spec, parallel);
    return {std::move(est), std::move(sel)};
}

const TraceRecord& map_estimate(const ChainTrace& trace) {
    if (trace.records.empty()) throw ContractViolation("MAP estimate needs a non-empty trace");
    const TraceRecord* best = &trace.records.front();
    for (const auto& r : trace.records)
        if (r.log_posterior > best->log_posterior ||
            (r.log_posterior == best->log_posterior && r.iter < best->iter))
            best = &r;
    return *best;
}

}  // namespace odfmix
