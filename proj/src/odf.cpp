#include "odfmix/odf.hpp"

#include <cmath>

#include "odfmix/sphere.hpp"

namespace odfmix {

double Odf::log_density(const UnitQuaternion& g) const { return std::log(density(g)); }

void Odf::density(std::span<const UnitQuaternion> g, std::span<double> out) const {
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = density(g[i]);
}

MixtureOdf::MixtureOdf(MixtureState state, SymmetryGroup qc, SymmetryGroup qs, const NormalizerTable& table)
    : state_(std::move(state)), qc_(std::move(qc)), qs_(std::move(qs)), table_(&table) {}

double MixtureOdf::density(const UnitQuaternion& g) const { return std::exp(log_density(g)); }

double MixtureOdf::log_density(const UnitQuaternion& g) const {
    return sbm_logpdf(g, state_, qc_, qs_, *table_);
}

double UniformOdf::density(const UnitQuaternion&) const { return 1.0 / kSphereArea; }

}  // namespace odfmix
