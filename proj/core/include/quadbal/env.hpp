#pragma once

#include <array>
#include <deque>
#include <memory>
#include <optional>

#include "quadbal/rng.hpp"
#include "quadbal/simcore.hpp"

namespace quadbal::env {

using simcore::Vec12;
using spatial::Vec3;

constexpr int kObsDim = 44;   // [lin_acc(3), ang_vel(3), roll_pitch(2), q(12), dq(12), a_prev(12)]
constexpr int kExpDim = 13;   // [contacts(4), v_body(3), v_plf(3), w_plf(3)] in body frame
constexpr int kImpDim = 29;   // [body_mass(1), com_shift(3), friction(1), kp(12), kd(12)]
constexpr int kAlnDim = 3;    // [v_plf,xy - v_body,xy (2), w_plf,z - w_body,z (1)]
constexpr int kActDim = 12;
constexpr double kActionClamp = 0.6;  // rad, applied before PD targeting

using ObsVec = Eigen::Matrix<double, kObsDim, 1>;
using ExpVec = Eigen::Matrix<double, kExpDim, 1>;
using ImpVec = Eigen::Matrix<double, kImpDim, 1>;
using AlnVec = Eigen::Matrix<double, kAlnDim, 1>;
using ActVec = Eigen::Matrix<double, kActDim, 1>;

struct Observation {
    ObsVec v = ObsVec::Zero();
};

struct ExplicitParams {
    ExpVec v = ExpVec::Zero();
};

struct AlignmentCommand {
    AlnVec v = AlnVec::Zero();
};

struct Action {
    ActVec v = ActVec::Zero();
};

struct RewardCoeffs {
    std::array<double, 19> k = {10.0, 3.0,  1.2,  2.0,  0.3,  1.0,  0.2,  4.0,  0.1, 1e-7,
                                1e-4, 1e-4, 1e-7, 1e-6, 1e-5, 0.01, 2.0,  3.0,  0.05};
    double h_des = 0.37;          // m, desired body height above the platform top
    double f_tol = 50.0;          // N, tolerated contact force
    double t_swing_des = 0.1;     // s
    double t_contact_des = 0.5;   // s
    double gamma = 0.99;
    // substitute |t - t_des| in the touchdown/liftoff duration terms
    bool abs_duration_terms = false;
    double height_violation_band = 0.1;  // m
};

struct RewardBreakdown {
    std::array<double, 5> task{};
    std::array<double, 7> reg{};
    double total = 0.0;
};

// Everything compute_reward needs, extracted from simulator state so the
// reward stays a pure function.
struct RewardInputs {
    bool collision = false;
    Eigen::Vector2d body_xy_platform = Eigen::Vector2d::Zero();
    double body_height_platform = 0.37;  // above the top surface
    AlnVec u_aln = AlnVec::Zero();
    Eigen::Vector2d roll_pitch_world = Eigen::Vector2d::Zero();
    Vec12 tau = Vec12::Zero(), tau_prev = Vec12::Zero();
    Vec12 dq = Vec12::Zero(), ddq = Vec12::Zero();
    ActVec action = ActVec::Zero(), action_prev = ActVec::Zero();
    std::array<double, 4> contact_force_norm{};
    std::array<bool, 4> contact{}, contact_prev{};
    std::array<double, 4> swing_time{}, contact_time{};
    std::array<Eigen::Vector2d, 4> foot_vel_platform_xy{};
    std::array<Eigen::Vector2d, 4> foot_pos_platform_xy{};
    Eigen::Vector2d platform_vel_platform_xy = Eigen::Vector2d::Zero();
    double platform_omega_z = 0.0;  // yaw rate seen in the platform frame
};

RewardBreakdown compute_reward(const RewardInputs& in, const RewardCoeffs& coeffs);

// Table of training/testing randomization ranges.
struct DomainRanges {
    double mass_lo = 4.0, mass_hi = 5.0;
    double com_lo = -0.2, com_hi = 0.2;
    double friction_lo = 0.8, friction_hi = 1.2;
    double kp_lo = 36.0, kp_hi = 44.0;
    double kd_lo = 0.8, kd_hi = 1.2;
    double plat_kp_lo = 1.0, plat_kp_hi = 1.5;
    double plat_kd_lo = 0.02, plat_kd_hi = 0.03;

    static DomainRanges training();
    static DomainRanges testing();
};

simcore::IntrinsicParams sample_intrinsics(const DomainRanges& r, Rng& rng);
void sample_platform_gains(simcore::PlatformSim& plat, const DomainRanges& r, Rng& rng);

// x_imp normalized to about [-1, 1] with fixed constants (testing-range span)
// so the encoder sees balanced inputs regardless of the sampled ranges.
ImpVec normalize_intrinsics(const simcore::IntrinsicParams& p);

struct StepInfo {
    ExplicitParams x_exp;
    ImpVec x_imp = ImpVec::Zero();
    AlignmentCommand u_aln;
    RewardBreakdown reward;
    bool done = false;
    bool collision = false;
    bool blowup = false;
    bool timeout = false;
    bool success = false;          // valid when done
    bool height_violation = false; // |h - h_des| > band at this step
    double power = 0.0;            // sum_j max(tau_j dq_j, 0)
    double time = 0.0;
    double body_height_platform = 0.0;
    double position_deviation = 0.0;  // |p^P_body,xy|
    double rotation_deviation = 0.0;  // |yaw in platform frame - initial|
};

struct EnvConfig {
    simcore::SimConfig sim;
    RewardCoeffs reward;
    double episode_duration = 10.0;  // trajectory duration caps this
};

// One robot-on-platform episode instance.
class Env {
public:
    Env(simcore::RobotModel model, EnvConfig cfg);

    // Episode setup: platform on xi(0), robot standing at the platform center
    // with a uniform random yaw relative to the platform.
    Observation reset(const trajgen::PlatformTrajectory& traj,
                      const simcore::IntrinsicParams& intrinsics,
                      const Eigen::Matrix<double, 6, 1>& plat_kp,
                      const Eigen::Matrix<double, 6, 1>& plat_kd, uint64_t seed);

    // throws std::logic_error when called on a finished episode
    StepInfo step(const Action& action);

    bool done() const { return done_; }
    double time() const { return sim_.time(); }
    const Observation& observation() const { return obs_; }
    const ExplicitParams& explicit_params() const { return x_exp_; }
    const ImpVec& intrinsics_normalized() const { return x_imp_; }
    const AlignmentCommand& alignment() const { return u_aln_; }
    const simcore::RobotSim& sim() const { return sim_; }
    double spawn_yaw() const { return spawn_yaw_; }
    double platform_gain_scale() const { return gain_scale_; }
    void set_platform_gain_scale(double s) { gain_scale_ = s; }

    // observation history (previous H observations, newest last); the episode
    // start pads with the initial observation
    void history_into(Eigen::Ref<Eigen::MatrixXd> rows, int H) const;

    const EnvConfig& config() const { return cfg_; }
    const simcore::RobotModel& model() const { return sim_.model(); }

private:
    EnvConfig cfg_;
    simcore::RobotSim sim_;
    trajgen::PlatformTrajectory traj_;
    Observation obs_;
    ExplicitParams x_exp_;
    ImpVec x_imp_ = ImpVec::Zero();
    AlignmentCommand u_aln_;
    ActVec action_prev_ = ActVec::Zero();
    std::deque<ObsVec> history_;
    bool done_ = true;
    double spawn_yaw_ = 0.0;
    double initial_yaw_platform_ = 0.0;
    double gain_scale_ = 400.0;
    int max_history_ = 128;

    void refresh_derived();
    RewardInputs build_reward_inputs(const std::array<bool, 4>& contact_prev, const Vec12& tau_prev,
                                     const ActVec& action, bool collision) const;
};

// Free observation/feature builders (also used by tests).
Observation build_observation(const simcore::RobotState& state, const ActVec& action_prev,
                              double gravity);
ExplicitParams build_explicit_params(const simcore::RobotState& state,
                                     const simcore::PlatformSim& plat);
AlignmentCommand alignment_command(const ExplicitParams& x, double omega_body_z);

}  // namespace quadbal::env
