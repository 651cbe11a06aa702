#pragma once

#include <array>
#include <random>

#include "odfmix/normalizer.hpp"
#include "odfmix/quaternion.hpp"
#include "odfmix/symmetry.hpp"

namespace odfmix {

using Rng = std::mt19937_64;

/// Columns v1..v4 of an orthonormal 4x4 matrix.
using Frame = std::array<Vec4, 4>;

/// Deterministic orthonormal completion of a unit 4-vector: the columns of the
/// left-multiplication matrix of q, i.e. (q*1, q*i, q*j, q*k).
Frame quaternion_frame(const UnitQuaternion& v1);

/// Scale vector lambda (lambda1 >= lambda2 >= lambda3 >= lambda4 = 0) and
/// orthonormal frame V. Density ~ exp(-sum_d lambda_d (v_d^T g)^2), so the
/// mode sits at +-v4 and v1 is the most suppressed axis.
class BinghamComponent {
public:
    BinghamComponent() : BinghamComponent(Vec4{0, 0, 0, 0}, UnitQuaternion::identity()) {}
    /// V completed from its first column with quaternion_frame().
    BinghamComponent(const Vec4& lambda, const UnitQuaternion& v1);
    /// General orthonormal V; validated to 1e-10.
    BinghamComponent(const Vec4& lambda, const Frame& V);

    const Vec4& lambda() const { return lambda_; }
    const Frame& V() const { return V_; }
    UnitQuaternion v1() const { return UnitQuaternion::normalize(V_[0]); }
    bool is_uniform() const { return lambda_[0] == 0.0 && lambda_[1] == 0.0 && lambda_[2] == 0.0; }

    /// x^T A x with A = sum_d lambda_d v_d v_d^T.
    double quadratic(const Vec4& x) const;

    /// Applies [v_d]_{j,k} = qj * v_d * qk column-wise.
    BinghamComponent rotated(const UnitQuaternion& qj, const UnitQuaternion& qk) const;

    bool operator==(const BinghamComponent&) const = default;

private:
    Vec4 lambda_;
    Frame V_;
};

/// Throws std::invalid_argument unless lambda1 >= lambda2 >= lambda3 >= lambda4 == 0.
void validate_scales(const Vec4& lambda);

/// Log of the symmetric Bingham density, evaluated literally as
/// (1/JK)(1/F) sum_{j,k} exp(-sum_d lambda_d ((qj v_d qk)^T g)^2) with a
/// max-shifted log-sum-exp. F comes from the table.
double sb_logpdf(const UnitQuaternion& g, const BinghamComponent& comp, const SymmetryGroup& qc,
                 const SymmetryGroup& qs, const NormalizerTable& table);
/// Same with an explicit log normalizer.
double sb_logpdf(const UnitQuaternion& g, const BinghamComponent& comp, const SymmetryGroup& qc,
                 const SymmetryGroup& qs, double log_normalizer);

/// Exact Bingham sampler by angular-central-Gaussian envelope rejection.
class BinghamSampler {
public:
    explicit BinghamSampler(const BinghamComponent& comp);
    UnitQuaternion operator()(Rng& rng);

    /// Expected acceptance probability of the envelope, F(lambda) / (M * integral
    /// of the envelope); evaluates F by quadrature on each call.
    double envelope_acceptance() const;
    double empirical_acceptance() const {
        return proposals_ ? static_cast<double>(accepted_) / static_cast<double>(proposals_) : 1.0;
    }
    double envelope_b() const { return b_; }

private:
    BinghamComponent comp_;
    double b_ = 4.0;
    std::array<double, 4> scale_{};
    double log_bound_ = 0.0;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
    std::size_t proposals_ = 0, accepted_ = 0;
};

/// One draw from the (non-symmetrized) Bingham density of comp.
UnitQuaternion sample_bingham(const BinghamComponent& comp, Rng& rng);

/// One draw from the symmetric Bingham density: uniform (j, k), then a draw
/// from the component with columns rotated to qj * v_d * qk.
UnitQuaternion sample_symmetric_bingham(const BinghamComponent& comp, const SymmetryGroup& qc,
                                        const SymmetryGroup& qs, Rng& rng);

/// Uniform draw on S^3.
UnitQuaternion sample_uniform(Rng& rng);

}  // namespace odfmix
