#pragma once

#include "odfmix/quaternion.hpp"

namespace odfmix {

/// Bunge (Z-X-Z) Euler angles in radians.
/// phi1 in [0, 2pi), Phi in [0, pi], phi2 in [0, 2pi).
struct EulerAngles {
    double phi1 = 0.0;
    double Phi = 0.0;
    double phi2 = 0.0;
};

/// q = Rz(phi1) * Rx(Phi) * Rz(phi2).
UnitQuaternion euler_to_quat(const EulerAngles& e);

/// Inverse of euler_to_quat up to sign. At Phi in {0, pi} the split between
/// phi1 and phi2 is degenerate and phi2 = 0 is returned.
EulerAngles quat_to_euler(const UnitQuaternion& q);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDeg = kPi / 180.0;

}  // namespace odfmix
