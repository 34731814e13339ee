#pragma once

#include <array>
#include <optional>

#include "quadbal/spatial.hpp"
#include "quadbal/trajgen.hpp"

namespace quadbal::simcore {

using spatial::Rotation;
using spatial::Vec3;
using trajgen::Vector6;
using Vec12 = Eigen::Matrix<double, 12, 1>;

constexpr int kNumLegs = 4;
constexpr int kNumJoints = 12;

// Leg order: 0 = front-left, 1 = front-right, 2 = rear-left, 3 = rear-right.
// Joints per leg: hip abduction (about body x), hip flexion (about body y),
// knee (about body y); q index = 3 * leg + joint.
struct RobotModel {
    double structure_mass = 7.24;    // kg, fixed limb/frame mass
    double nominal_body_mass = 4.5;  // kg, midpoint of the randomized trunk mass

    double body_length = 0.48;   // m, x
    double body_width = 0.32;    // m, y
    double body_height = 0.114;  // m, z (collision box)
    double standing_height = 0.37;

    double hip_x = 0.183;
    double hip_y = 0.047;
    double abd_offset = 0.0838;
    double thigh_length = 0.2;
    double calf_length = 0.2;

    double torque_limit = 33.5;   // N*m per joint
    double joint_inertia = 0.08;  // kg*m^2 effective per joint

    Vec12 q_nominal = Vec12::Zero();
    Vec12 q_min = Vec12::Zero();
    Vec12 q_max = Vec12::Zero();

    static RobotModel a1();
    double total_mass(double body_mass) const { return structure_mass + body_mass; }
    Eigen::Matrix3d body_inertia(double mass) const;
};

// Randomized per episode (Table ranges live in env::DomainRanges).
struct IntrinsicParams {
    double body_mass = 4.5;             // kg
    Vec3 com_shift = Vec3::Zero();      // m, body frame
    double friction = 1.0;
    Vec12 kp = Vec12::Constant(40.0);   // N*m/rad
    Vec12 kd = Vec12::Constant(1.0);    // N*m*s/rad
};

struct SimConfig {
    double control_dt = 0.02;  // s
    int substeps = 4;
    double gravity = 9.81;            // m/s^2
    double contact_stiffness = 1e4;   // N/m
    double contact_damping = 100.0;   // N*s/m
    double tangential_damping = 2e3;  // N*s/m viscous stick gain
    double collision_margin = 0.0;    // m added to penetration tests
    double blowup_limit = 1e6;
    double min_base_height = 0.05;  // m above the top surface, below -> collision
};

struct RobotState {
    Vec3 base_pos = Vec3::Zero();  // box center, world
    Rotation base_rot;
    Vec3 base_lin_vel = Vec3::Zero();  // base-origin velocity, world
    Vec3 base_lin_acc = Vec3::Zero();  // base-origin acceleration, world
    Vec3 base_ang_vel = Vec3::Zero();  // world
    Vec3 com_vel = Vec3::Zero();       // integrated state (CoM velocity, world)

    Vec12 q = Vec12::Zero();
    Vec12 dq = Vec12::Zero();
    Vec12 ddq = Vec12::Zero();
    Vec12 tau = Vec12::Zero();
    Vec12 tau_prev = Vec12::Zero();

    std::array<bool, kNumLegs> contact{};
    std::array<Vec3, kNumLegs> foot_force{};   // world
    std::array<double, kNumLegs> swing_time{};    // duration of current/last swing phase
    std::array<double, kNumLegs> contact_time{};  // duration of current/last contact phase

    bool within_limit(double limit) const;
};

// PD-driven 6-DoF platform, kinematically dominant with respect to the robot.
// pose/rate are per-DoF (x, y, z, roll, pitch, yaw); the rotational rate is
// Euler-angle rates, converted to a world angular velocity on demand.
struct PlatformSim {
    double half_x = 1.0, half_y = 1.0, half_z = 0.1;  // shape [2.0, 2.0, 0.2]
    Vector6 pose = Vector6::Zero();
    Vector6 rate = Vector6::Zero();
    Vector6 kp = Vector6::Constant(1.25);  // tracking gains (Table ranges)
    Vector6 kd = Vector6::Constant(0.025);
    // The gain ranges above are normalized; this scale converts them to
    // acceleration-units gains that actually follow the commanded trajectory
    // (see README, platform tracking).
    double gain_scale = 400.0;

    const trajgen::PlatformTrajectory* trajectory = nullptr;

    Vec3 position() const { return pose.head<3>(); }
    spatial::EulerXYZ euler() const { return {pose[3], pose[4], pose[5]}; }
    Rotation rotation() const { return spatial::euler_to_rotation(euler()); }
    Vec3 linear_velocity() const { return rate.head<3>(); }
    Vec3 angular_velocity() const;  // world
    // velocity of the platform material point currently at p_world
    Vec3 velocity_of_point(const Vec3& p_world) const;
    // position in the platform frame; z measured from the platform center
    Vec3 to_platform_frame(const Vec3& p_world) const;
    // height of a world point above the top surface
    double height_above_top(const Vec3& p_world) const;
    bool inside_extent_xy(const Vec3& p_platform) const {
        return std::abs(p_platform.x()) <= half_x && std::abs(p_platform.y()) <= half_y;
    }

    void reset_on_trajectory();
};

// tau = kp (q_target - q) - kd dq, clamped to the motor torque limit
Vec12 apply_pd_targets(const RobotState& state, const Vec12& q_target,
                       const IntrinsicParams& params, const RobotModel& model);

// One semi-implicit Euler step of the platform PD tracker at time t.
void step_platform(PlatformSim& plat, double t, double dt);

struct FootKinematics {
    std::array<Vec3, kNumLegs> foot_body{};
    std::array<Vec3, kNumLegs> foot_world{};
    std::array<Vec3, kNumLegs> foot_vel_world{};
    std::array<Vec3, kNumLegs> knee_world{};
    std::array<Eigen::Matrix3d, kNumLegs> jacobian_body{};  // d foot_body / d q_leg
};

FootKinematics foot_kinematics(const RobotModel& model, const Vec12& q, const Vec12& dq,
                               const Vec3& base_pos, const Rotation& base_rot,
                               const Vec3& base_lin_vel, const Vec3& base_ang_vel);

struct ContactResult {
    std::array<Vec3, kNumLegs> force{};  // world, on the foot
    std::array<bool, kNumLegs> contact{};
};

// Spring-damper normal force with a viscous stick force clamped to the
// Coulomb cone, both relative to the moving platform surface.
ContactResult contact_forces(const FootKinematics& kin, const PlatformSim& plat,
                             const IntrinsicParams& params, const SimConfig& cfg);

// One physics substep: rigid base driven by gravity and contact forces,
// kinematic legs with per-joint effective inertia.
void step_robot(RobotState& state, const Vec12& tau, const ContactResult& contact,
                const FootKinematics& kin, const RobotModel& model,
                const IntrinsicParams& params, const SimConfig& cfg, double dt);

bool detect_collision(const RobotState& state, const PlatformSim& plat, const RobotModel& model,
                      const SimConfig& cfg);

// Diagnostic: kinetic + potential + contact spring energy.
double total_energy(const RobotState& state, const PlatformSim& plat, const RobotModel& model,
                    const IntrinsicParams& params, const SimConfig& cfg);

// Convenience driver: PD torques recomputed every substep, then contacts,
// robot and platform integration. Returns false when the state exceeds the
// blowup limit.
class RobotSim {
public:
    RobotSim(RobotModel model, SimConfig cfg) : model_(model), cfg_(cfg) {}

    RobotModel& model() { return model_; }
    const RobotModel& model() const { return model_; }
    const SimConfig& config() const { return cfg_; }
    SimConfig& config() { return cfg_; }
    RobotState& state() { return state_; }
    const RobotState& state() const { return state_; }
    PlatformSim& platform() { return plat_; }
    const PlatformSim& platform() const { return plat_; }
    IntrinsicParams& params() { return params_; }
    const IntrinsicParams& params() const { return params_; }
    double time() const { return time_; }

    void reset(const RobotState& state, const PlatformSim& plat, const IntrinsicParams& params,
               double t0 = 0.0);
    bool control_step(const Vec12& q_target);

private:
    RobotModel model_;
    SimConfig cfg_;
    RobotState state_;
    PlatformSim plat_;
    IntrinsicParams params_;
    double time_ = 0.0;
};

}  // namespace quadbal::simcore
