#pragma once

#include <array>
#include <span>
#include <vector>

#include "odfmix/euler.hpp"
#include "odfmix/odf.hpp"

namespace odfmix {

using Direction = std::array<double, 3>;

struct GridSpec {
    enum class Kind { EulerGrid, PoleFigure };
    Kind kind = Kind::EulerGrid;
    double resolution_deg = 5.0;
    std::vector<Direction> poles;  ///< crystal-frame directions, any length (pole figures)

    /// Problems found, empty when valid: the resolution must divide 360
    /// evenly, poles must be finite, nonzero and present for pole figures.
    std::vector<std::string> problems() const;
};

/// phi1, phi2 in [0, 360) and Phi in [0, 180], all in steps of the resolution
/// (degrees), phi1 slowest.
std::vector<EulerAngles> euler_grid(double resolution_deg);

struct EulerGridValues {
    std::vector<EulerAngles> angles;
    std::vector<double> mud;  ///< density / (1 / (2 pi^2))
};

EulerGridValues evaluate_euler_grid(const Odf& odf, double resolution_deg);

/// Pole density in multiples of uniform on the upper hemisphere, azimuth in
/// [0, 360) and polar angle in [0, 90] in steps of the resolution.
struct PoleFigure {
    Direction pole;
    std::vector<double> azimuth_deg;
    std::vector<double> polar_deg;
    std::vector<double> mud;
};

/// Smooths the specimen directions g^-1 (qc_j^-1 h) qs_k^-1 and their
/// antipodes over the samples with the kernel ((1 + r.x) / 2)^kappa on S^2,
/// normalized so that the uniform pole density is 1.
PoleFigure pole_figure(std::span<const UnitQuaternion> samples, const SymmetryGroup& qc, const SymmetryGroup& qs,
                       const Direction& pole, double resolution_deg, double kappa = 40.0);

}  // namespace odfmix
