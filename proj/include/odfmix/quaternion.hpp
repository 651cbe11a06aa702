#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

namespace odfmix {

using Vec4 = std::array<double, 4>;

inline double dot(const Vec4& a, const Vec4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

/// Hamilton product on raw 4-vectors, scalar first (w, x, y, z).
inline Vec4 hamilton(const Vec4& a, const Vec4& b) {
    return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

/// A point on S^3 representing a rotation. Scalar-first, Hamilton convention,
/// active rotations. q and -q describe the same rotation.
class UnitQuaternion {
public:
    UnitQuaternion() : c_{1.0, 0.0, 0.0, 0.0} {}

    /// Normalizes the input. Throws std::invalid_argument for a zero or
    /// non-finite vector.
    static UnitQuaternion normalize(const Vec4& v);
    static UnitQuaternion normalize(double w, double x, double y, double z) {
        return normalize(Vec4{w, x, y, z});
    }
    static UnitQuaternion identity() { return {}; }
    /// Rotation by `angle` radians about the (not necessarily unit) axis.
    static UnitQuaternion axis_angle(double ax, double ay, double az, double angle);

    double w() const { return c_[0]; }
    double x() const { return c_[1]; }
    double y() const { return c_[2]; }
    double z() const { return c_[3]; }
    double operator[](std::size_t i) const { return c_[i]; }
    const Vec4& vec() const { return c_; }

    UnitQuaternion conj() const { return raw({c_[0], -c_[1], -c_[2], -c_[3]}); }
    UnitQuaternion inverse() const { return conj(); }
    UnitQuaternion operator-() const { return raw({-c_[0], -c_[1], -c_[2], -c_[3]}); }

    /// Rotation angle in [0, pi], sign-independent.
    double angle() const { return 2.0 * std::acos(std::min(1.0, std::fabs(c_[0]))); }

    /// Exact component equality.
    bool operator==(const UnitQuaternion&) const = default;

private:
    explicit UnitQuaternion(const Vec4& c) : c_(c) {}
    static UnitQuaternion raw(const Vec4& c) { return UnitQuaternion(c); }
    Vec4 c_;
};

/// Hamilton product, renormalized.
UnitQuaternion qmul(const UnitQuaternion& a, const UnitQuaternion& b);
inline UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
    return qmul(a, b);
}

inline double dot(const UnitQuaternion& a, const UnitQuaternion& b) { return dot(a.vec(), b.vec()); }

/// True when a and b describe the same rotation within tol (compares up to sign).
bool same_rotation(const UnitQuaternion& a, const UnitQuaternion& b, double tol = 1e-12);

/// Misorientation angle between two rotations, in [0, pi].
double rotation_distance(const UnitQuaternion& a, const UnitQuaternion& b);

/// Rotates a 3-vector actively: q v q^-1.
std::array<double, 3> rotate(const UnitQuaternion& q, const std::array<double, 3>& v);

/// 4x4 matrix of left multiplication, L(q) * b == q * b (row-major).
std::array<double, 16> left_matrix(const UnitQuaternion& q);
/// 4x4 matrix of right multiplication, R(q) * a == a * q (row-major).
std::array<double, 16> right_matrix(const UnitQuaternion& q);

std::ostream& operator<<(std::ostream& os, const UnitQuaternion& q);

}  // namespace odfmix
