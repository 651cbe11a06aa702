#include "odfmix/tempering.hpp"

#include <cmath>
#include <memory>
#include <optional>

#include "odfmix/errors.hpp"

namespace odfmix {

namespace {
// Stream index of the swap RNG; rungs use 0 .. |T| - 1.
constexpr std::uint64_t kSwapStream = 0xffffffffULL;
}  // namespace

TemperatureLadder::TemperatureLadder(std::vector<double> temps) : temps_(std::move(temps)) {
    if (temps_.empty()) throw ContractViolation("temperature ladder is empty");
    if (temps_.front() != 1.0) throw ContractViolation("temperature ladder must start at exactly 1");
    for (std::size_t t = 0; t < temps_.size(); ++t) {
        if (!(temps_[t] > 0.0 && temps_[t] <= 1.0))
            throw ContractViolation("temperatures must lie in (0, 1]");
        if (t > 0 && !(temps_[t] < temps_[t - 1]))
            throw ContractViolation("temperature ladder must be strictly decreasing");
    }
}

TemperatureLadder TemperatureLadder::standard() {
    return TemperatureLadder({1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1});
}

double swap_log_acceptance(double log_post_t, double log_post_t1, double T_t, double T_t1, SwapRule rule) {
    if (rule == SwapRule::Literal) return log_post_t - log_post_t1;
    if (T_t == T_t1) return 0.0;
    return (T_t - T_t1) * (log_post_t1 - log_post_t);
}

PtResult run_pt(const Dataset& data, const Hyperparams& h, const SamplerConfig& config,
                const TemperatureLadder& ladder, SwapRule rule, const NormalizerTable& table,
                const SaveCallback& on_save) {
    config.validate();
    h.validate();
    const ModalOrientations modes = modal_orientations(data, h.M_max);
    std::optional<LikelihoodEvaluator> lik;
    if (config.likelihood) lik.emplace(data, table, config.parallel);

    const std::size_t R = ladder.size();
    std::vector<std::unique_ptr<Chain>> rungs;
    for (std::size_t r = 0; r < R; ++r) {
        rungs.push_back(std::make_unique<Chain>(lik ? &*lik : nullptr, h, config, modes, ladder[r],
                                                Rng(derive_seed(config.seed, r))));
        rungs.back()->set_adapting(config.adapt && config.burn_in > 0);
    }
    Rng swap_rng(derive_seed(config.seed, kSwapStream));
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    PtResult out;
    out.swaps.resize(R > 1 ? R - 1 : 0);
    out.trace.initial = rungs[0]->state();
    std::vector<MoveRecord> moves(R);
    const auto n_rungs = static_cast<long long>(R);
    for (std::size_t it = 1; it <= config.n_iters; ++it) {
#pragma omp parallel for schedule(dynamic, 1) if (n_rungs > 1)
        for (long long r = 0; r < n_rungs; ++r) moves[r] = rungs[r]->step();

        if (R > 1) {
            std::uniform_int_distribution<std::size_t> pick(0, R - 2);
            const std::size_t t = pick(swap_rng);
            Chain& a = *rungs[t];
            Chain& b = *rungs[t + 1];
            const double la = swap_log_acceptance(a.log_posterior(), b.log_posterior(), ladder[t], ladder[t + 1], rule);
            ++out.swaps[t].proposed;
            if (std::log(unif(swap_rng)) < la) {
                a.swap_state(b);
                ++out.swaps[t].accepted;
            }
        }
        if (it == config.burn_in)
            for (auto& c : rungs) c->set_adapting(false);
        if (it > config.burn_in && (it - config.burn_in) % config.thin == 0) {
            const Chain& cold = *rungs[0];
            cold.state().validate(h.M_max);
            TraceRecord rec{it, cold.state(), cold.log_posterior(), moves[0]};
            if (on_save) on_save(rec);
            out.trace.records.push_back(std::move(rec));
        }
    }
    out.trace.adaptation = rungs[0]->adaptation_history();
    out.trace.final_tuning = rungs[0]->tuning();
    for (const auto& c : rungs) out.rungs.push_back({c->temperature(), c->counts(), c->tuning()});
    return out;
}

}  // namespace odfmix
