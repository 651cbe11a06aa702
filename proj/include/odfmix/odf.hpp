#pragma once

#include <span>
#include <vector>

#include "odfmix/bingham.hpp"
#include "odfmix/mixture.hpp"

namespace odfmix {

/// A probability density over S^3 (with respect to the uniform surface
/// measure, so the uniform ODF is 1 / (2 pi^2)).
class Odf {
public:
    virtual ~Odf() = default;
    virtual double density(const UnitQuaternion& g) const = 0;
    virtual double log_density(const UnitQuaternion& g) const;
    /// out[i] = density(g[i]).
    virtual void density(std::span<const UnitQuaternion> g, std::span<double> out) const;
};

/// A symmetric Bingham mixture at fixed parameters (e.g. the MAP state).
class MixtureOdf : public Odf {
public:
    MixtureOdf(MixtureState state, SymmetryGroup qc, SymmetryGroup qs, const NormalizerTable& table);
    double density(const UnitQuaternion& g) const override;
    double log_density(const UnitQuaternion& g) const override;
    using Odf::density;
    const MixtureState& state() const { return state_; }

private:
    MixtureState state_;
    SymmetryGroup qc_, qs_;
    const NormalizerTable* table_;
};

/// The flat density 1 / (2 pi^2).
class UniformOdf : public Odf {
public:
    double density(const UnitQuaternion&) const override;
    using Odf::density;
};

}  // namespace odfmix
