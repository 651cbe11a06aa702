#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "odfmix/kernels.hpp"
#include "odfmix/mixture.hpp"
#include "odfmix/odf.hpp"

namespace odfmix {

/// C(kappa) = Gamma(kappa + 2) / (2 pi^(3/2) Gamma(kappa + 1/2)), the constant
/// that makes C |cos(w/2)|^(2 kappa) integrate to 1 over S^3.
double dvp_constant(double kappa);

/// de la Vallee Poussin kernel. Larger kappa is a narrower kernel.
struct KernelSpec {
    double kappa = 20.0;
    double constant = 0.0;

    /// Throws ContractViolation unless kappa is finite and >= 0.
    static KernelSpec make(double kappa);
};

/// (C / JK) sum_{j,k} |(qc_j * center * qs_k) . g|^(2 kappa).
double dvp_kernel(const UnitQuaternion& g, const UnitQuaternion& center, const KernelSpec& spec,
                  const SymmetryGroup& qc, const SymmetryGroup& qs);

/// f(g) = (1/n) sum_i dvp_kernel(g, g_i). Immutable; safe to share.
class KdeEstimator : public Odf {
public:
    /// Throws ContractViolation when the data are empty.
    KdeEstimator(const std::vector<UnitQuaternion>& centers, const SymmetryGroup& qc, const SymmetryGroup& qs,
                 const KernelSpec& spec, bool parallel = true);
    KdeEstimator(const Dataset& data, const KernelSpec& spec, bool parallel = true)
        : KdeEstimator(data.observations, data.qc, data.qs, spec, parallel) {}

    double density(const UnitQuaternion& g) const override;
    /// Exact even where the density underflows.
    double log_density(const UnitQuaternion& g) const override;
    void density(std::span<const UnitQuaternion> g, std::span<double> out) const override;
    /// out[i] = log_density(g[i]).
    void log_density(std::span<const UnitQuaternion> g, std::span<double> out) const;

    const KernelSpec& spec() const { return spec_; }
    std::size_t size() const { return points_.points; }

private:
    double exact_log_sum(const Vec4& q) const;

    kernels::ClassPoints points_;
    KernelSpec spec_;
    double log_scale_;  ///< log(C / (n J K))
    bool parallel_;
};

/// Bandwidth grid {2.5, 5, 10, 20, 40, 80, 160}.
const std::vector<double>& bandwidth_grid();

struct BandwidthSelection {
    KernelSpec spec;
    std::vector<double> kappas;
    std::vector<double> scores;   ///< leave-one-out log score per grid value
    std::size_t points_used = 0;  ///< n, or the subsample size above the cap
    std::optional<std::string> warning;
};

/// Leave-one-out log score sum_i log f_{-i}(g_i) at every grid value, exact
/// in the log domain where the sums underflow. Needs n >= 2.
std::vector<double> loo_scores(const Dataset& data, std::span<const double> kappas, bool parallel = true);

/// Maximizes the leave-one-out score over bandwidth_grid(); ties go to the
/// smaller kappa. Above `cap` points a uniform subsample (seeded from the
/// data) is scored. All scores -inf: kappa = 20 with a warning.
/// Throws ContractViolation for n < 10.
BandwidthSelection select_bandwidth(const Dataset& data, bool parallel = true, std::size_t cap = 20000);

}  // namespace odfmix
