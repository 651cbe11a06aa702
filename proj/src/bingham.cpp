#include "odfmix/bingham.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace odfmix {

Frame quaternion_frame(const UnitQuaternion& v1) {
    const double w = v1.w(), x = v1.x(), y = v1.y(), z = v1.z();
    return {Vec4{w, x, y, z}, Vec4{-x, w, z, -y}, Vec4{-y, -z, w, x}, Vec4{-z, y, -x, w}};
}

void validate_scales(const Vec4& l) {
    for (double v : l)
        if (!std::isfinite(v)) throw std::invalid_argument("scale parameters must be finite");
    if (l[3] != 0.0) throw std::invalid_argument("lambda4 must be 0");
    if (!(l[0] >= l[1] && l[1] >= l[2] && l[2] >= 0.0))
        throw std::invalid_argument("scale parameters must satisfy lambda1 >= lambda2 >= lambda3 >= 0");
}

BinghamComponent::BinghamComponent(const Vec4& lambda, const UnitQuaternion& v1)
    : lambda_(lambda), V_(quaternion_frame(v1)) {
    validate_scales(lambda_);
}

BinghamComponent::BinghamComponent(const Vec4& lambda, const Frame& V) : lambda_(lambda), V_(V) {
    validate_scales(lambda_);
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
            const double expect = a == b ? 1.0 : 0.0;
            if (std::fabs(dot(V_[a], V_[b]) - expect) > 1e-10)
                throw std::invalid_argument("orientation matrix V is not orthonormal");
        }
}

double BinghamComponent::quadratic(const Vec4& x) const {
    double s = 0.0;
    for (std::size_t d = 0; d < 4; ++d) {
        if (lambda_[d] == 0.0) continue;
        const double p = dot(V_[d], x);
        s += lambda_[d] * p * p;
    }
    return s;
}

BinghamComponent BinghamComponent::rotated(const UnitQuaternion& qj, const UnitQuaternion& qk) const {
    Frame out;
    for (std::size_t d = 0; d < 4; ++d) out[d] = hamilton(hamilton(qj.vec(), V_[d]), qk.vec());
    return BinghamComponent(lambda_, out);
}

double sb_logpdf(const UnitQuaternion& g, const BinghamComponent& comp, const SymmetryGroup& qc,
                 const SymmetryGroup& qs, double log_normalizer) {
    const std::size_t J = qc.size(), K = qs.size();
    std::vector<double> e;
    e.reserve(J * K);
    double emin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t k = 0; k < K; ++k) {
            double s = 0.0;
            for (std::size_t d = 0; d < 4; ++d) {
                const double l = comp.lambda()[d];
                if (l == 0.0) continue;
                const Vec4 v = hamilton(hamilton(qc[j].vec(), comp.V()[d]), qs[k].vec());
                const double p = dot(v, g.vec());
                s += l * p * p;
            }
            e.push_back(s);
            emin = std::min(emin, s);
        }
    double sum = 0.0;
    for (double s : e) sum += std::exp(emin - s);
    return -emin + std::log(sum) - std::log(static_cast<double>(J * K)) - log_normalizer;
}

double sb_logpdf(const UnitQuaternion& g, const BinghamComponent& comp, const SymmetryGroup& qc,
                 const SymmetryGroup& qs, const NormalizerTable& table) {
    return sb_logpdf(g, comp, qc, qs, table.log_f(comp.lambda()));
}

BinghamSampler::BinghamSampler(const BinghamComponent& comp) : comp_(comp) {
    const Vec4& l = comp_.lambda();
    // b solves sum_i 1 / (b + 2 lambda_i) = 1 on [1, 4]
    double lo = 1.0, hi = 4.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        double s = 0.0;
        for (double li : l) s += 1.0 / (mid + 2.0 * li);
        (s > 1.0 ? lo : hi) = mid;
        if (hi - lo < 1e-15) break;
    }
    b_ = 0.5 * (lo + hi);
    for (std::size_t d = 0; d < 4; ++d) scale_[d] = 1.0 / std::sqrt(1.0 + 2.0 * l[d] / b_);
    log_bound_ = 0.5 * (4.0 - b_) + 2.0 * std::log(b_ / 4.0);
}

double BinghamSampler::envelope_acceptance() const {
    const double F = f_quadrature(comp_.lambda(), 96);
    double det = 1.0;
    for (double s : scale_) det *= s;  // |Omega|^{-1/2}
    const double log_m = -log_bound_;
    return F / (std::exp(log_m) * kSphereArea * det);
}

UnitQuaternion BinghamSampler::operator()(Rng& rng) {
    const Frame& V = comp_.V();
    for (;;) {
        ++proposals_;
        Vec4 y{0, 0, 0, 0};
        for (std::size_t d = 0; d < 4; ++d) {
            const double zd = normal_(rng) * scale_[d];
            for (std::size_t c = 0; c < 4; ++c) y[c] += V[d][c] * zd;
        }
        const double norm = std::sqrt(dot(y, y));
        if (!(norm > 0.0)) continue;
        for (double& c : y) c /= norm;
        const double xax = comp_.quadratic(y);
        double xox = 0.0;
        for (std::size_t d = 0; d < 4; ++d) {
            const double p = dot(V[d], y);
            xox += (1.0 + 2.0 * comp_.lambda()[d] / b_) * p * p;
        }
        const double log_accept = -xax + 2.0 * std::log(xox) + log_bound_;
        if (std::log(unif_(rng)) < log_accept) {
            ++accepted_;
            return UnitQuaternion::normalize(y);
        }
    }
}

UnitQuaternion sample_bingham(const BinghamComponent& comp, Rng& rng) {
    BinghamSampler sampler(comp);
    return sampler(rng);
}

UnitQuaternion sample_symmetric_bingham(const BinghamComponent& comp, const SymmetryGroup& qc,
                                        const SymmetryGroup& qs, Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick_j(0, qc.size() - 1), pick_k(0, qs.size() - 1);
    const std::size_t j = pick_j(rng);
    const std::size_t k = pick_k(rng);
    return sample_bingham(comp.rotated(qc[j], qs[k]), rng);
}

UnitQuaternion sample_uniform(Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (;;) {
        Vec4 v{normal(rng), normal(rng), normal(rng), normal(rng)};
        if (dot(v, v) > 1e-300) return UnitQuaternion::normalize(v);
    }
}

}  // namespace odfmix
