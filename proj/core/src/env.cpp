#include "quadbal/env.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace quadbal::env {

namespace {
constexpr double kPi = std::numbers::pi;
}

RewardBreakdown compute_reward(const RewardInputs& in, const RewardCoeffs& c) {
    RewardBreakdown out;
    const auto& k = c.k;

    out.task[0] = in.collision ? -k[0] : 0.0;
    out.task[1] = k[1] * std::exp(-in.body_xy_platform.norm() / k[2]);
    out.task[2] = k[3] * std::exp(-in.u_aln.norm() / k[4]);
    out.task[3] = k[5] * std::exp(-in.roll_pitch_world.norm() / k[6]);
    out.task[4] = k[7] * std::exp(-std::abs(in.body_height_platform - c.h_des) / k[8]);

    out.reg[0] = -(k[9] * (in.tau - in.tau_prev).norm() + k[10] * (in.action - in.action_prev).norm());
    out.reg[1] = -(k[11] * in.tau.norm() + k[12] * in.dq.norm() + k[13] * in.ddq.norm());

    double power = 0.0;
    for (int j = 0; j < 12; ++j) power += std::max(in.tau[j] * in.dq[j], 0.0);
    out.reg[2] = -k[14] * power;

    double overshoot = 0.0;
    for (int i = 0; i < 4; ++i) overshoot += std::max(in.contact_force_norm[i] - c.f_tol, 0.0);
    out.reg[3] = -k[15] * overshoot;

    double touchdown = 0.0, liftoff = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double td_gate = (in.contact[i] && !in.contact_prev[i]) ? 1.0 : 0.0;
        const double lo_gate = (!in.contact[i] && in.contact_prev[i]) ? 1.0 : 0.0;
        double swing_term = in.swing_time[i] - c.t_swing_des;
        double contact_term = in.contact_time[i] - c.t_contact_des;
        if (c.abs_duration_terms) {
            swing_term = std::abs(swing_term);
            contact_term = std::abs(contact_term);
        }
        touchdown += swing_term * td_gate;
        liftoff += contact_term * lo_gate;
    }
    out.reg[4] = -k[16] * touchdown;
    out.reg[5] = -k[17] * liftoff;

    double slip = 0.0;
    for (int i = 0; i < 4; ++i) {
        const auto rigid = spatial::planar_cross(
            in.platform_omega_z, {in.foot_pos_platform_xy[i].x(), in.foot_pos_platform_xy[i].y()});
        const Eigen::Vector2d expected(in.platform_vel_platform_xy.x() + rigid.first,
                                       in.platform_vel_platform_xy.y() + rigid.second);
        slip += (in.foot_vel_platform_xy[i] - expected).norm();
    }
    out.reg[6] = -k[18] * slip;

    out.total = 0.0;
    for (double v : out.task) out.total += v;
    for (double v : out.reg) out.total += v;
    return out;
}

DomainRanges DomainRanges::training() { return {}; }

DomainRanges DomainRanges::testing() {
    DomainRanges r;
    r.mass_lo = 3.5;
    r.mass_hi = 5.5;
    r.com_lo = -0.25;
    r.com_hi = 0.25;
    r.friction_lo = 0.7;
    r.friction_hi = 1.3;
    r.kp_lo = 32.0;
    r.kp_hi = 48.0;
    r.kd_lo = 0.6;
    r.kd_hi = 1.4;
    r.plat_kp_lo = 0.5;
    r.plat_kp_hi = 2.0;
    r.plat_kd_lo = 0.01;
    r.plat_kd_hi = 0.04;
    return r;
}

simcore::IntrinsicParams sample_intrinsics(const DomainRanges& r, Rng& rng) {
    simcore::IntrinsicParams p;
    p.body_mass = rng.uniform(r.mass_lo, r.mass_hi);
    for (int i = 0; i < 3; ++i) p.com_shift[i] = rng.uniform(r.com_lo, r.com_hi);
    p.friction = rng.uniform(r.friction_lo, r.friction_hi);
    for (int i = 0; i < 12; ++i) p.kp[i] = rng.uniform(r.kp_lo, r.kp_hi);
    for (int i = 0; i < 12; ++i) p.kd[i] = rng.uniform(r.kd_lo, r.kd_hi);
    return p;
}

void sample_platform_gains(simcore::PlatformSim& plat, const DomainRanges& r, Rng& rng) {
    for (int i = 0; i < 6; ++i) plat.kp[i] = rng.uniform(r.plat_kp_lo, r.plat_kp_hi);
    for (int i = 0; i < 6; ++i) plat.kd[i] = rng.uniform(r.plat_kd_lo, r.plat_kd_hi);
}

ImpVec normalize_intrinsics(const simcore::IntrinsicParams& p) {
    // fixed affine map; spans taken from the testing ranges
    ImpVec v;
    v[0] = (p.body_mass - 4.5) / 1.0;
    for (int i = 0; i < 3; ++i) v[1 + i] = p.com_shift[i] / 0.25;
    v[4] = (p.friction - 1.0) / 0.3;
    for (int i = 0; i < 12; ++i) v[5 + i] = (p.kp[i] - 40.0) / 8.0;
    for (int i = 0; i < 12; ++i) v[17 + i] = (p.kd[i] - 1.0) / 0.4;
    return v;
}

Observation build_observation(const simcore::RobotState& state, const ActVec& action_prev,
                              double gravity) {
    Observation o;
    const Eigen::Matrix3d rt = state.base_rot.m.transpose();
    // IMU specific force: gravity-included accelerometer reading
    const Vec3 specific_force = rt * (state.base_lin_acc + Vec3(0.0, 0.0, gravity));
    const Vec3 omega_body = rt * state.base_ang_vel;
    const spatial::EulerXYZ euler = spatial::euler_from_rotation(state.base_rot);
    o.v.segment<3>(0) = specific_force;
    o.v.segment<3>(3) = omega_body;
    o.v[6] = euler.roll;
    o.v[7] = euler.pitch;
    o.v.segment<12>(8) = state.q;
    o.v.segment<12>(20) = state.dq;
    o.v.segment<12>(32) = action_prev;
    return o;
}

ExplicitParams build_explicit_params(const simcore::RobotState& state,
                                     const simcore::PlatformSim& plat) {
    ExplicitParams x;
    const Eigen::Matrix3d rt = state.base_rot.m.transpose();
    for (int i = 0; i < 4; ++i) x.v[i] = state.contact[i] ? 1.0 : 0.0;
    x.v.segment<3>(4) = rt * state.base_lin_vel;
    x.v.segment<3>(7) = rt * plat.linear_velocity();
    x.v.segment<3>(10) = rt * plat.angular_velocity();
    return x;
}

AlignmentCommand alignment_command(const ExplicitParams& x, double omega_body_z) {
    AlignmentCommand u;
    u.v[0] = x.v[7] - x.v[4];
    u.v[1] = x.v[8] - x.v[5];
    u.v[2] = x.v[12] - omega_body_z;
    return u;
}

Env::Env(simcore::RobotModel model, EnvConfig cfg)
    : cfg_(cfg), sim_(model, cfg.sim) {}

Observation Env::reset(const trajgen::PlatformTrajectory& traj,
                       const simcore::IntrinsicParams& intrinsics,
                       const Eigen::Matrix<double, 6, 1>& plat_kp,
                       const Eigen::Matrix<double, 6, 1>& plat_kd, uint64_t seed) {
    traj_ = traj;

    simcore::PlatformSim plat;
    plat.kp = plat_kp;
    plat.kd = plat_kd;
    plat.gain_scale = gain_scale_;
    plat.trajectory = &traj_;
    plat.reset_on_trajectory();

    Rng rng(seed);
    // uniform over (-pi, pi]
    spawn_yaw_ = kPi - rng.uniform(0.0, 2.0 * kPi);

    const spatial::Rotation plat_rot = plat.rotation();
    simcore::RobotState st;
    st.base_rot = plat_rot * spatial::euler_to_rotation({0.0, 0.0, spawn_yaw_});
    st.base_pos = plat.position() +
                  plat_rot * Vec3(0.0, 0.0, plat.half_z + sim_.model().standing_height);
    st.base_ang_vel = plat.angular_velocity();
    st.base_lin_vel = plat.velocity_of_point(st.base_pos);
    st.com_vel = st.base_lin_vel + st.base_ang_vel.cross(st.base_rot * intrinsics.com_shift);
    st.base_lin_acc = Vec3::Zero();
    st.q = sim_.model().q_nominal;

    sim_.reset(st, plat, intrinsics, 0.0);

    done_ = false;
    action_prev_ = ActVec::Zero();
    initial_yaw_platform_ = spawn_yaw_;
    history_.clear();

    refresh_derived();
    return obs_;
}

void Env::refresh_derived() {
    obs_ = build_observation(sim_.state(), action_prev_, cfg_.sim.gravity);
    x_exp_ = build_explicit_params(sim_.state(), sim_.platform());
    x_imp_ = normalize_intrinsics(sim_.params());
    const Vec3 omega_body = sim_.state().base_rot.m.transpose() * sim_.state().base_ang_vel;
    u_aln_ = alignment_command(x_exp_, omega_body.z());
}

void Env::history_into(Eigen::Ref<Eigen::MatrixXd> rows, int H) const {
    // rows: H x kObsDim, oldest first. history_ holds past observations
    // (newest last, current excluded); the episode start pads with the first
    // observation.
    const int have = int(history_.size());
    for (int i = 0; i < H; ++i) {
        const int idx = have - H + i;
        if (have == 0) {
            rows.row(i) = obs_.v.transpose();
        } else {
            rows.row(i) = history_[size_t(std::clamp(idx, 0, have - 1))].transpose();
        }
    }
}

RewardInputs Env::build_reward_inputs(const std::array<bool, 4>& contact_prev,
                                      const Vec12& tau_prev, const ActVec& action,
                                      bool collision) const {
    const auto& st = sim_.state();
    const auto& plat = sim_.platform();
    RewardInputs in;
    in.collision = collision;

    const Vec3 body_plat = plat.to_platform_frame(st.base_pos);
    in.body_xy_platform = body_plat.head<2>();
    in.body_height_platform = body_plat.z() - plat.half_z;
    in.u_aln = u_aln_.v;

    const spatial::EulerXYZ e = spatial::euler_from_rotation(st.base_rot);
    in.roll_pitch_world = Eigen::Vector2d(e.roll, e.pitch);

    in.tau = st.tau;
    in.tau_prev = tau_prev;
    in.dq = st.dq;
    in.ddq = st.ddq;
    in.action = action;
    in.action_prev = action_prev_;

    const Eigen::Matrix3d plat_rt = plat.rotation().m.transpose();
    const simcore::FootKinematics kin = simcore::foot_kinematics(
        sim_.model(), st.q, st.dq, st.base_pos, st.base_rot, st.base_lin_vel, st.base_ang_vel);
    for (int i = 0; i < 4; ++i) {
        in.contact_force_norm[i] = st.foot_force[i].norm();
        in.contact[i] = st.contact[i];
        in.contact_prev[i] = contact_prev[i];
        in.swing_time[i] = st.swing_time[i];
        in.contact_time[i] = st.contact_time[i];
        const Vec3 foot_p = plat.to_platform_frame(kin.foot_world[i]);
        in.foot_pos_platform_xy[i] = foot_p.head<2>();
        const Vec3 foot_v_p = plat_rt * kin.foot_vel_world[i];
        in.foot_vel_platform_xy[i] = foot_v_p.head<2>();
    }
    const Vec3 plat_v_p = plat_rt * plat.linear_velocity();
    in.platform_vel_platform_xy = plat_v_p.head<2>();
    in.platform_omega_z = (plat_rt * plat.angular_velocity()).z();
    return in;
}

StepInfo Env::step(const Action& action) {
    if (done_) throw std::logic_error("Env::step called on a finished episode");

    const ActVec a = action.v.cwiseMax(-kActionClamp).cwiseMin(kActionClamp);
    const Vec12 q_target = sim_.model().q_nominal + a;

    const std::array<bool, 4> contact_prev = sim_.state().contact;
    const ObsVec prev_obs = obs_.v;

    const bool finite = sim_.control_step(q_target);

    StepInfo info;
    info.time = sim_.time();
    info.blowup = !finite || spatial::near_gimbal_lock(sim_.state().base_rot);

    bool collision = info.blowup;
    if (!collision) {
        collision = simcore::detect_collision(sim_.state(), sim_.platform(), sim_.model(),
                                              cfg_.sim);
    }
    info.collision = collision;

    const double duration = std::min(cfg_.episode_duration, traj_.duration());
    info.timeout = !collision && sim_.time() >= duration - 1e-9;
    info.done = collision || info.timeout;
    info.success = info.done && !collision;

    RewardInputs rin;
    if (info.blowup) {
        // no usable state; the step only pays the collision penalty
        x_imp_ = normalize_intrinsics(sim_.params());
        info.reward.task[0] = -cfg_.reward.k[0];
        info.reward.total = info.reward.task[0];
        rin.body_height_platform = cfg_.reward.h_des;
    } else {
        refresh_derived();
        rin = build_reward_inputs(contact_prev, sim_.state().tau_prev, a, collision);
        info.reward = compute_reward(rin, cfg_.reward);
    }

    info.x_exp = x_exp_;
    info.x_imp = x_imp_;
    info.u_aln = u_aln_;
    info.body_height_platform = rin.body_height_platform;
    info.height_violation =
        std::abs(rin.body_height_platform - cfg_.reward.h_des) > cfg_.reward.height_violation_band;
    double power = 0.0;
    for (int j = 0; j < 12; ++j) {
        power += std::max(sim_.state().tau[j] * sim_.state().dq[j], 0.0);
    }
    info.power = power;
    info.position_deviation = rin.body_xy_platform.norm();
    if (!info.blowup) {
        const spatial::Rotation rel = sim_.platform().rotation().inverse() * sim_.state().base_rot;
        if (!spatial::near_gimbal_lock(rel)) {
            const double yaw = spatial::euler_from_rotation(rel).yaw;
            info.rotation_deviation = std::abs(spatial::wrap_angle(yaw - initial_yaw_platform_));
        }
    }

    action_prev_ = a;
    history_.push_back(prev_obs);
    while (int(history_.size()) > max_history_) history_.pop_front();
    done_ = info.done;
    return info;
}

}  // namespace quadbal::env
