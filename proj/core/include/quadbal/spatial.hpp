#pragma once

#include <Eigen/Dense>
#include <utility>

namespace quadbal::spatial {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Extrinsic x-y-z Euler angles (roll about world x, then pitch about world y,
// then yaw about world z). Canonical range (-pi, pi] per component.
struct EulerXYZ {
    double roll = 0.0;
    double pitch = 0.0;
    double yaw = 0.0;
};

// 3x3 rotation matrix wrapper. Orthonormality is the caller's invariant;
// is_valid() checks it to 1e-9.
struct Rotation {
    Mat3 m = Mat3::Identity();

    static Rotation identity() { return {}; }
    Rotation inverse() const { return {m.transpose()}; }
    Rotation operator*(const Rotation& o) const { return {m * o.m}; }
    Vec3 operator*(const Vec3& v) const { return m * v; }
    bool is_valid(double tol = 1e-9) const;
};

struct FrameTransform {
    Rotation rotation;
    Vec3 translation = Vec3::Zero();

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
    FrameTransform inverse() const {
        Rotation rinv = rotation.inverse();
        return {rinv, -(rinv * translation)};
    }
    FrameTransform operator*(const FrameTransform& o) const {
        return {rotation * o.rotation, rotation * o.translation + translation};
    }
};

// wrap to (-pi, pi]
double wrap_angle(double a);

// R = Rz(yaw) * Ry(pitch) * Rx(roll)
Rotation euler_to_rotation(const EulerXYZ& e);

// Inverse of euler_to_rotation. Throws std::domain_error within 1e-6 of the
// |pitch| = pi/2 singularity.
EulerXYZ euler_from_rotation(const Rotation& r);

// True iff euler_from_rotation would throw for this rotation.
bool near_gimbal_lock(const Rotation& r, double tol = 1e-6);

// Express a world vector in the frame whose orientation is frame_rot.
inline Vec3 world_to_frame(const Vec3& v_world, const Rotation& frame_rot) {
    return frame_rot.m.transpose() * v_world;
}

inline Vec3 frame_to_world(const Vec3& v_frame, const Rotation& frame_rot) {
    return frame_rot.m * v_frame;
}

// Planar velocity contribution of a yaw rate at an offset: omega_z x p.
inline std::pair<double, double> planar_cross(double omega_z, std::pair<double, double> p_xy) {
    return {-omega_z * p_xy.second, omega_z * p_xy.first};
}

Mat3 skew(const Vec3& v);

// Rotation by angle |w| about axis w/|w| (matrix exponential of skew(w)).
Rotation exp_so3(const Vec3& w);

// Maps extrinsic-XYZ Euler angle rates to the world angular velocity:
// omega = E(roll, pitch) * (droll, dpitch, dyaw).
Mat3 euler_rate_to_omega_matrix(const EulerXYZ& e);

}  // namespace quadbal::spatial
