#include "odfmix/quaternion.hpp"

#include <iomanip>
#include <stdexcept>

#include "odfmix/euler.hpp"

namespace odfmix {

UnitQuaternion UnitQuaternion::normalize(const Vec4& v) {
    const double n = std::sqrt(dot(v, v));
    if (!(n > 0.0) || !std::isfinite(n))
        throw std::invalid_argument("cannot normalize a zero or non-finite quaternion");
    return UnitQuaternion(Vec4{v[0] / n, v[1] / n, v[2] / n, v[3] / n});
}

UnitQuaternion UnitQuaternion::axis_angle(double ax, double ay, double az, double angle) {
    const double n = std::sqrt(ax * ax + ay * ay + az * az);
    if (!(n > 0.0)) throw std::invalid_argument("rotation axis must be nonzero");
    const double s = std::sin(0.5 * angle) / n;
    return normalize(std::cos(0.5 * angle), ax * s, ay * s, az * s);
}

UnitQuaternion qmul(const UnitQuaternion& a, const UnitQuaternion& b) {
    return UnitQuaternion::normalize(hamilton(a.vec(), b.vec()));
}

bool same_rotation(const UnitQuaternion& a, const UnitQuaternion& b, double tol) {
    double plus = 0.0, minus = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        plus = std::max(plus, std::fabs(a[i] - b[i]));
        minus = std::max(minus, std::fabs(a[i] + b[i]));
    }
    return std::min(plus, minus) <= tol;
}

double rotation_distance(const UnitQuaternion& a, const UnitQuaternion& b) {
    return 2.0 * std::acos(std::min(1.0, std::fabs(dot(a, b))));
}

std::array<double, 3> rotate(const UnitQuaternion& q, const std::array<double, 3>& v) {
    const Vec4 p{0.0, v[0], v[1], v[2]};
    const Vec4 r = hamilton(hamilton(q.vec(), p), q.conj().vec());
    return {r[1], r[2], r[3]};
}

std::array<double, 16> left_matrix(const UnitQuaternion& q) {
    const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
    return {w, -x, -y, -z,
            x,  w, -z,  y,
            y,  z,  w, -x,
            z, -y,  x,  w};
}

std::array<double, 16> right_matrix(const UnitQuaternion& q) {
    const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
    return {w, -x, -y, -z,
            x,  w,  z, -y,
            y, -z,  w,  x,
            z,  y, -x,  w};
}

std::ostream& operator<<(std::ostream& os, const UnitQuaternion& q) {
    return os << '(' << q.w() << ", " << q.x() << ", " << q.y() << ", " << q.z() << ')';
}

namespace {

double wrap_two_pi(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    if (a >= 2.0 * kPi) a = 0.0;
    return a;
}

}  // namespace

UnitQuaternion euler_to_quat(const EulerAngles& e) {
    const double sum = 0.5 * (e.phi1 + e.phi2);
    const double diff = 0.5 * (e.phi1 - e.phi2);
    const double c = std::cos(0.5 * e.Phi), s = std::sin(0.5 * e.Phi);
    return UnitQuaternion::normalize(c * std::cos(sum), s * std::cos(diff), s * std::sin(diff),
                                     c * std::sin(sum));
}

EulerAngles quat_to_euler(const UnitQuaternion& q) {
    const double cw = std::hypot(q.w(), q.z());
    const double sx = std::hypot(q.x(), q.y());
    EulerAngles e;
    e.Phi = 2.0 * std::atan2(sx, cw);
    constexpr double degenerate = 1e-12;
    if (sx < degenerate) {
        e.Phi = 0.0;
        e.phi1 = wrap_two_pi(2.0 * std::atan2(q.z(), q.w()));
        e.phi2 = 0.0;
    } else if (cw < degenerate) {
        e.Phi = kPi;
        e.phi1 = wrap_two_pi(2.0 * std::atan2(q.y(), q.x()));
        e.phi2 = 0.0;
    } else {
        const double sum = std::atan2(q.z(), q.w());
        const double diff = std::atan2(q.y(), q.x());
        e.phi1 = wrap_two_pi(sum + diff);
        e.phi2 = wrap_two_pi(sum - diff);
    }
    return e;
}

}  // namespace odfmix
