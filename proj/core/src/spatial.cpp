#include "quadbal/spatial.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace quadbal::spatial {

namespace {
constexpr double kPi = std::numbers::pi;
}

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a > kPi) a -= 2.0 * kPi;
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

bool Rotation::is_valid(double tol) const {
    const Mat3 err = m * m.transpose() - Mat3::Identity();
    return err.cwiseAbs().maxCoeff() <= tol && std::abs(m.determinant() - 1.0) <= tol;
}

Rotation euler_to_rotation(const EulerXYZ& e) {
    const double cr = std::cos(e.roll), sr = std::sin(e.roll);
    const double cp = std::cos(e.pitch), sp = std::sin(e.pitch);
    const double cy = std::cos(e.yaw), sy = std::sin(e.yaw);
    Mat3 m;
    m << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
         sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
             -sp,                cp * sr,                cp * cr;
    return {m};
}

bool near_gimbal_lock(const Rotation& r, double tol) {
    const double s = std::clamp(-r.m(2, 0), -1.0, 1.0);
    return kPi / 2.0 - std::abs(std::asin(s)) < tol;
}

EulerXYZ euler_from_rotation(const Rotation& r) {
    if (near_gimbal_lock(r)) {
        throw std::domain_error("euler_from_rotation: pitch within 1e-6 of +-pi/2");
    }
    EulerXYZ e;
    e.pitch = std::asin(std::clamp(-r.m(2, 0), -1.0, 1.0));
    e.roll = std::atan2(r.m(2, 1), r.m(2, 2));
    e.yaw = std::atan2(r.m(1, 0), r.m(0, 0));
    return e;
}

Mat3 skew(const Vec3& v) {
    Mat3 s;
    s << 0, -v.z(), v.y(),
         v.z(), 0, -v.x(),
        -v.y(), v.x(), 0;
    return s;
}

Rotation exp_so3(const Vec3& w) {
    const double angle = w.norm();
    if (angle < 1e-12) {
        // second-order expansion keeps the result orthonormal to machine precision
        Mat3 s = skew(w);
        return {Mat3(Mat3::Identity() + s + 0.5 * s * s)};
    }
    const Vec3 axis = w / angle;
    const Mat3 s = skew(axis);
    return {Mat3(Mat3::Identity() + std::sin(angle) * s + (1.0 - std::cos(angle)) * s * s)};
}

Mat3 euler_rate_to_omega_matrix(const EulerXYZ& e) {
    const double cp = std::cos(e.pitch), sp = std::sin(e.pitch);
    const double cy = std::cos(e.yaw), sy = std::sin(e.yaw);
    Mat3 m;
    m << cy * cp, -sy, 0,
         sy * cp,  cy, 0,
             -sp,   0, 1;
    return m;
}

}  // namespace quadbal::spatial
