#include "quadbal/simcore.hpp"

#include <cmath>

namespace quadbal::simcore {

namespace {
// leg mounting signs: {x, y} for FL, FR, RL, RR
constexpr double kSx[kNumLegs] = {1.0, 1.0, -1.0, -1.0};
constexpr double kSy[kNumLegs] = {1.0, -1.0, 1.0, -1.0};

Eigen::Matrix3d rot_x(double a) {
    Eigen::Matrix3d m;
    m << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
    return m;
}

Eigen::Vector3d ry_times(double a, double vx, double vz) {
    // Ry(a) * (vx, 0, vz)
    return {std::cos(a) * vx + std::sin(a) * vz, 0.0, -std::sin(a) * vx + std::cos(a) * vz};
}
}  // namespace

RobotModel RobotModel::a1() {
    RobotModel m;
    const double theta = std::acos(m.standing_height / (m.thigh_length + m.calf_length));
    for (int leg = 0; leg < kNumLegs; ++leg) {
        m.q_nominal[3 * leg + 0] = 0.0;
        m.q_nominal[3 * leg + 1] = theta;
        m.q_nominal[3 * leg + 2] = -2.0 * theta;
        m.q_min[3 * leg + 0] = -0.8;
        m.q_max[3 * leg + 0] = 0.8;
        m.q_min[3 * leg + 1] = -1.0;
        m.q_max[3 * leg + 1] = 2.0;
        m.q_min[3 * leg + 2] = -2.7;
        m.q_max[3 * leg + 2] = -0.15;
    }
    return m;
}

Eigen::Matrix3d RobotModel::body_inertia(double mass) const {
    const double l2 = body_length * body_length;
    const double w2 = body_width * body_width;
    const double h2 = body_height * body_height;
    Eigen::Vector3d d(mass / 12.0 * (w2 + h2), mass / 12.0 * (l2 + h2), mass / 12.0 * (l2 + w2));
    return d.asDiagonal();
}

bool RobotState::within_limit(double limit) const {
    auto ok = [&](double v) { return std::isfinite(v) && std::abs(v) <= limit; };
    for (int i = 0; i < 3; ++i) {
        if (!ok(base_pos[i]) || !ok(base_lin_vel[i]) || !ok(base_ang_vel[i]) || !ok(com_vel[i])) {
            return false;
        }
    }
    for (int i = 0; i < kNumJoints; ++i) {
        if (!ok(q[i]) || !ok(dq[i])) return false;
    }
    return true;
}

Vec3 PlatformSim::angular_velocity() const {
    return spatial::euler_rate_to_omega_matrix(euler()) * Vec3(rate[3], rate[4], rate[5]);
}

Vec3 PlatformSim::velocity_of_point(const Vec3& p_world) const {
    return linear_velocity() + angular_velocity().cross(p_world - position());
}

Vec3 PlatformSim::to_platform_frame(const Vec3& p_world) const {
    return rotation().m.transpose() * (p_world - position());
}

double PlatformSim::height_above_top(const Vec3& p_world) const {
    return to_platform_frame(p_world).z() - half_z;
}

void PlatformSim::reset_on_trajectory() {
    if (!trajectory) return;
    pose = trajectory->value6(0.0);
    rate = trajectory->derivative6(0.0);
}

Vec12 apply_pd_targets(const RobotState& state, const Vec12& q_target,
                       const IntrinsicParams& params, const RobotModel& model) {
    Vec12 tau = params.kp.cwiseProduct(q_target - state.q) - params.kd.cwiseProduct(state.dq);
    return tau.cwiseMax(-model.torque_limit).cwiseMin(model.torque_limit);
}

void step_platform(PlatformSim& plat, double t, double dt) {
    if (!plat.trajectory) return;
    const Vector6 target = plat.trajectory->value6(t);
    const Vector6 target_rate = plat.trajectory->derivative6(t);
    const Vector6 acc = plat.gain_scale * (plat.kp.cwiseProduct(target - plat.pose) +
                                           plat.kd.cwiseProduct(target_rate - plat.rate));
    plat.rate += acc * dt;
    plat.pose += plat.rate * dt;
}

FootKinematics foot_kinematics(const RobotModel& model, const Vec12& q, const Vec12& dq,
                               const Vec3& base_pos, const Rotation& base_rot,
                               const Vec3& base_lin_vel, const Vec3& base_ang_vel) {
    FootKinematics out;
    for (int leg = 0; leg < kNumLegs; ++leg) {
        const double qa = q[3 * leg + 0];
        const double qh = q[3 * leg + 1];
        const double qk = q[3 * leg + 2];
        const Vec3 hip(kSx[leg] * model.hip_x, kSy[leg] * model.hip_y, 0.0);
        const Eigen::Matrix3d rx = rot_x(qa);
        const Vec3 side(0.0, kSy[leg] * model.abd_offset, 0.0);
        const Vec3 thigh = ry_times(qh, 0.0, -model.thigh_length);
        const Vec3 calf = ry_times(qh + qk, 0.0, -model.calf_length);

        const Vec3 foot_b = hip + rx * (side + thigh + calf);
        const Vec3 knee_b = hip + rx * (side + thigh);
        out.foot_body[leg] = foot_b;
        out.foot_world[leg] = base_pos + base_rot * foot_b;
        out.knee_world[leg] = base_pos + base_rot * knee_b;

        // columns: d foot_b / d(qa, qh, qk), via rotation generators
        Eigen::Matrix3d jac;
        jac.col(0) = Vec3::UnitX().cross(Vec3(foot_b - hip));
        jac.col(1) = rx * Vec3::UnitY().cross(thigh + calf);
        jac.col(2) = rx * Vec3::UnitY().cross(calf);
        out.jacobian_body[leg] = jac;

        const Vec3 dq_leg(dq[3 * leg], dq[3 * leg + 1], dq[3 * leg + 2]);
        out.foot_vel_world[leg] = base_lin_vel + base_ang_vel.cross(base_rot * foot_b) +
                                  base_rot * (jac * dq_leg);
    }
    return out;
}

ContactResult contact_forces(const FootKinematics& kin, const PlatformSim& plat,
                             const IntrinsicParams& params, const SimConfig& cfg) {
    ContactResult out;
    const Rotation plat_rot = plat.rotation();
    const Vec3 normal = plat_rot * Vec3::UnitZ();
    for (int leg = 0; leg < kNumLegs; ++leg) {
        const Vec3 p_plat = plat.to_platform_frame(kin.foot_world[leg]);
        if (!plat.inside_extent_xy(p_plat)) continue;
        const double depth = plat.half_z - p_plat.z();
        if (depth <= 0.0) continue;
        const Vec3 v_rel = kin.foot_vel_world[leg] - plat.velocity_of_point(kin.foot_world[leg]);
        const double vn = v_rel.dot(normal);
        const double fn = std::max(0.0, cfg.contact_stiffness * depth - cfg.contact_damping * vn);
        if (fn <= 0.0) continue;
        Vec3 ft = -cfg.tangential_damping * (v_rel - vn * normal);
        const double ft_max = params.friction * fn;
        const double ft_norm = ft.norm();
        if (ft_norm > ft_max) ft *= ft_max / ft_norm;
        out.force[leg] = fn * normal + ft;
        out.contact[leg] = true;
    }
    return out;
}

void step_robot(RobotState& state, const Vec12& tau, const ContactResult& contact,
                const FootKinematics& kin, const RobotModel& model,
                const IntrinsicParams& params, const SimConfig& cfg, double dt) {
    const double mass = model.total_mass(params.body_mass);
    const Vec3 com_world = state.base_pos + state.base_rot * params.com_shift;

    Vec3 force(0.0, 0.0, -mass * cfg.gravity);
    Vec3 torque = Vec3::Zero();
    for (int leg = 0; leg < kNumLegs; ++leg) {
        force += contact.force[leg];
        torque += (kin.foot_world[leg] - com_world).cross(contact.force[leg]);
    }

    const Eigen::Matrix3d inertia_w =
        state.base_rot.m * model.body_inertia(mass) * state.base_rot.m.transpose();
    const Vec3 omega = state.base_ang_vel;
    const Vec3 domega = inertia_w.ldlt().solve(torque - omega.cross(inertia_w * omega));

    const Vec3 prev_base_vel = state.base_lin_vel;

    // semi-implicit Euler on CoM translation and base rotation
    state.com_vel += (force / mass) * dt;
    state.base_ang_vel += domega * dt;
    state.base_rot = spatial::exp_so3(state.base_ang_vel * dt) * state.base_rot;
    const Vec3 com_new = com_world + state.com_vel * dt;
    state.base_pos = com_new - state.base_rot * params.com_shift;
    state.base_lin_vel = state.com_vel + state.base_ang_vel.cross(state.base_pos - com_new);
    state.base_lin_acc = (state.base_lin_vel - prev_base_vel) / dt;

    // joint dynamics: per-joint effective inertia, contact reaction via J^T
    state.tau = tau;
    for (int leg = 0; leg < kNumLegs; ++leg) {
        const Vec3 f_body = state.base_rot.m.transpose() * contact.force[leg];
        const Vec3 tau_contact = kin.jacobian_body[leg].transpose() * f_body;
        for (int j = 0; j < 3; ++j) {
            const int idx = 3 * leg + j;
            state.ddq[idx] = (tau[idx] + tau_contact[j]) / model.joint_inertia;
            state.dq[idx] += state.ddq[idx] * dt;
            state.q[idx] += state.dq[idx] * dt;
            if (state.q[idx] < model.q_min[idx]) {
                state.q[idx] = model.q_min[idx];
                if (state.dq[idx] < 0.0) state.dq[idx] = 0.0;
            } else if (state.q[idx] > model.q_max[idx]) {
                state.q[idx] = model.q_max[idx];
                if (state.dq[idx] > 0.0) state.dq[idx] = 0.0;
            }
        }
    }

    // contact bookkeeping and phase timers
    for (int leg = 0; leg < kNumLegs; ++leg) {
        const bool was = state.contact[leg];
        const bool now = contact.contact[leg];
        if (now) {
            if (!was) state.contact_time[leg] = 0.0;  // touchdown; swing_time keeps its value
            state.contact_time[leg] += dt;
        } else {
            if (was) state.swing_time[leg] = 0.0;  // liftoff; contact_time keeps its value
            state.swing_time[leg] += dt;
        }
        state.contact[leg] = now;
        state.foot_force[leg] = contact.force[leg];
    }
}

bool detect_collision(const RobotState& state, const PlatformSim& plat, const RobotModel& model,
                      const SimConfig& cfg) {
    const Vec3 base_plat = plat.to_platform_frame(state.base_pos);
    // fell off the platform
    if (!plat.inside_extent_xy(base_plat)) return true;
    // fallen / toppled
    if (base_plat.z() - plat.half_z < cfg.min_base_height) return true;

    auto penetrates = [&](const Vec3& p_world) {
        const Vec3 p = plat.to_platform_frame(p_world);
        return plat.inside_extent_xy(p) && p.z() < plat.half_z + cfg.collision_margin;
    };
    // 8 body box corners
    for (int sx = -1; sx <= 1; sx += 2) {
        for (int sy = -1; sy <= 1; sy += 2) {
            for (int sz = -1; sz <= 1; sz += 2) {
                const Vec3 corner_b(0.5 * sx * model.body_length, 0.5 * sy * model.body_width,
                                    0.5 * sz * model.body_height);
                if (penetrates(state.base_pos + state.base_rot * corner_b)) return true;
            }
        }
    }
    // 4 knee points
    const FootKinematics kin = foot_kinematics(model, state.q, state.dq, state.base_pos,
                                               state.base_rot, state.base_lin_vel,
                                               state.base_ang_vel);
    for (int leg = 0; leg < kNumLegs; ++leg) {
        if (penetrates(kin.knee_world[leg])) return true;
    }
    return false;
}

double total_energy(const RobotState& state, const PlatformSim& plat, const RobotModel& model,
                    const IntrinsicParams& params, const SimConfig& cfg) {
    const double mass = model.total_mass(params.body_mass);
    const Vec3 com = state.base_pos + state.base_rot * params.com_shift;
    const Eigen::Matrix3d inertia_w =
        state.base_rot.m * model.body_inertia(mass) * state.base_rot.m.transpose();
    double e = 0.5 * mass * state.com_vel.squaredNorm() +
               0.5 * state.base_ang_vel.dot(inertia_w * state.base_ang_vel) +
               mass * cfg.gravity * com.z();
    e += 0.5 * model.joint_inertia * state.dq.squaredNorm();
    const FootKinematics kin = foot_kinematics(model, state.q, state.dq, state.base_pos,
                                               state.base_rot, state.base_lin_vel,
                                               state.base_ang_vel);
    for (int leg = 0; leg < kNumLegs; ++leg) {
        const Vec3 p_plat = plat.to_platform_frame(kin.foot_world[leg]);
        if (!plat.inside_extent_xy(p_plat)) continue;
        const double depth = plat.half_z - p_plat.z();
        if (depth > 0.0) e += 0.5 * cfg.contact_stiffness * depth * depth;
    }
    return e;
}

void RobotSim::reset(const RobotState& state, const PlatformSim& plat,
                     const IntrinsicParams& params, double t0) {
    state_ = state;
    plat_ = plat;
    params_ = params;
    time_ = t0;
}

bool RobotSim::control_step(const Vec12& q_target) {
    const double dt = cfg_.control_dt / cfg_.substeps;
    state_.tau_prev = state_.tau;
    for (int s = 0; s < cfg_.substeps; ++s) {
        const Vec12 tau = apply_pd_targets(state_, q_target, params_, model_);
        const FootKinematics kin =
            foot_kinematics(model_, state_.q, state_.dq, state_.base_pos, state_.base_rot,
                            state_.base_lin_vel, state_.base_ang_vel);
        const ContactResult contact = contact_forces(kin, plat_, params_, cfg_);
        step_robot(state_, tau, contact, kin, model_, params_, cfg_, dt);
        if (plat_.trajectory) {
            const double t_next = std::min(time_ + (s + 1) * dt, plat_.trajectory->duration());
            step_platform(plat_, t_next, dt);
        }
    }
    time_ += cfg_.control_dt;
    return state_.within_limit(cfg_.blowup_limit);
}

}  // namespace quadbal::simcore
