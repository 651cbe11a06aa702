#include "odfmix/synthetic.hpp"

#include <cmath>

#include "odfmix/bingham.hpp"
#include "odfmix/errors.hpp"
#include "odfmix/euler.hpp"

namespace odfmix {

UnitQuaternion santafe_center() { return euler_to_quat({60.0 * kDeg, 54.7 * kDeg, 45.0 * kDeg}); }

UnitQuaternion sample_dvp(const UnitQuaternion& center, double kappa, Rng& rng) {
    std::gamma_distribution<double> ga(kappa + 0.5, 1.0), gb(1.5, 1.0);
    const double a = ga(rng), b = gb(rng);
    const double w = std::sqrt(a / (a + b));
    const double s = std::sqrt(b / (a + b));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::array<double, 3> axis{};
    double norm = 0.0;
    while (norm < 1e-300) {
        for (double& c : axis) c = normal(rng);
        norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    }
    const auto r = UnitQuaternion::normalize(w, s * axis[0] / norm, s * axis[1] / norm, s * axis[2] / norm);
    return r * center;
}

SyntheticData santafe_generate(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ContractViolation("santafe_generate needs n >= 1");
    SyntheticData out;
    out.data.qc = symmetry_group("cubic-24");
    out.data.qs = symmetry_group("cyclic-2");
    out.data.source = "santafe seed=" + std::to_string(seed);
    out.truth = {.generator = "santafe",
                 .seed = seed,
                 .n = n,
                 .qc = out.data.qc.name(),
                 .qs = out.data.qs.name(),
                 .weights = {kSantaFeWeight, 1.0 - kSantaFeWeight},
                 .kappa = kSantaFeKappa,
                 .center = santafe_center(),
                 .state = std::nullopt};
    const auto& qc = out.data.qc;
    const auto& qs = out.data.qs;
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick_j(0, qc.size() - 1), pick_k(0, qs.size() - 1);
    out.data.observations.reserve(n);
    out.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (unif(rng) < kSantaFeWeight) {
            const std::size_t j = pick_j(rng);
            const std::size_t k = pick_k(rng);
            out.data.observations.push_back(qc[j] * sample_dvp(santafe_center(), kSantaFeKappa, rng) * qs[k]);
            out.labels.push_back(0);
        } else {
            out.data.observations.push_back(sample_uniform(rng));
            out.labels.push_back(1);
        }
    }
    return out;
}

SyntheticData sbm_generate(std::size_t n, const MixtureState& state, const SymmetryGroup& qc,
                           const SymmetryGroup& qs, std::uint64_t seed) {
    if (n == 0) throw ContractViolation("sbm_generate needs n >= 1");
    if (state.M() == 0 || state.alpha.size() != state.M())
        throw ContractViolation("sbm_generate needs weights for every component");
    SyntheticData out;
    out.data.qc = qc;
    out.data.qs = qs;
    out.data.source = "sbm seed=" + std::to_string(seed);
    out.truth = {.generator = "sbm",
                 .seed = seed,
                 .n = n,
                 .qc = qc.name(),
                 .qs = qs.name(),
                 .weights = state.alpha,
                 .kappa = 0.0,
                 .center = UnitQuaternion::identity(),
                 .state = state};
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    out.data.observations.reserve(n);
    out.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = unif(rng);
        std::size_t m = 0;
        double acc = state.alpha[0];
        while (m + 1 < state.M() && u >= acc) acc += state.alpha[++m];
        out.data.observations.push_back(sample_symmetric_bingham(state.components[m], qc, qs, rng));
        out.labels.push_back(m);
    }
    return out;
}

}  // namespace odfmix
