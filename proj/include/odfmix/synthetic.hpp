#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "odfmix/mixture.hpp"

namespace odfmix {

/// What a synthetic dataset was drawn from.
struct GroundTruth {
    std::string generator;  ///< "santafe" or "sbm"
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::string qc, qs;
    std::vector<double> weights;  ///< component weights in label order
    /// santafe: the kernel component (label 0); label 1 is uniform.
    double kappa = 0.0;
    UnitQuaternion center;
    /// sbm: the generating mixture.
    std::optional<MixtureState> state;

    bool operator==(const GroundTruth&) const = default;
};

struct SyntheticData {
    Dataset data;
    std::vector<std::size_t> labels;  ///< generating component of each draw
    GroundTruth truth;
};

inline constexpr double kSantaFeWeight = 0.27;
inline constexpr double kSantaFeKappa = 80.0;
/// Bunge angles (60, 54.7, 45) degrees.
UnitQuaternion santafe_center();

/// One draw from C |cos(w/2)|^(2 kappa) about center: w^2 ~ Beta(kappa + 1/2,
/// 3/2) for the scalar part of the relative rotation, uniform axis.
UnitQuaternion sample_dvp(const UnitQuaternion& center, double kappa, Rng& rng);

/// Mixture of the symmetrized de la Vallee Poussin kernel (weight 0.27,
/// kappa 80, santafe_center(), cubic-24 x cyclic-2) and the uniform density.
/// Label 0 is the kernel, 1 the uniform.
SyntheticData santafe_generate(std::size_t n, std::uint64_t seed);

/// n draws from the symmetric Bingham mixture `state`.
SyntheticData sbm_generate(std::size_t n, const MixtureState& state, const SymmetryGroup& qc,
                           const SymmetryGroup& qs, std::uint64_t seed);

}  // namespace odfmix
