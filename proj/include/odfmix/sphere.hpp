#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "odfmix/quaternion.hpp"

namespace odfmix {

/// Gauss-Legendre nodes and weights on [a, b].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0);

/// Surface area of S^3.
inline constexpr double kSphereArea = 2.0 * 3.14159265358979323846 * 3.14159265358979323846;

/// Product Gauss-Legendre rule in Hopf coordinates
///   x = (cos t cos p, cos t sin p, sin t cos s, sin t sin s),
///   t in [0, pi/2], p, s in [0, 2pi), dS = cos t sin t dt dp ds.
/// `nodes` is the count per coordinate.
double hopf_quadrature(const std::function<double(const Vec4&)>& f, std::size_t nodes);

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Randomized quasi-Monte Carlo integral over S^3: a Halton sequence in
/// bases (2, 3, 5), pushed through the measure-preserving map of uniform
/// quaternions, with `replicates` independent Cranley-Patterson shifts.
/// The standard error is taken across replicates.
Estimate qmc_integrate(const std::function<double(const Vec4&)>& f, std::size_t points,
                       std::size_t replicates, std::uint64_t seed);

/// Maps a point of the unit cube to S^3 preserving the uniform measure.
Vec4 cube_to_sphere(double u1, double u2, double u3);

}  // namespace odfmix
