#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "quadbal/rng.hpp"
#include "quadbal/spatial.hpp"

namespace quadbal::trajgen {

using Vector6 = Eigen::Matrix<double, 6, 1>;

// DoF order used throughout: x, y, z, roll, pitch, yaw.
struct Waypoint6 {
    Vector6 v = Vector6::Zero();
    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }
};

struct DofRange {
    double lo = 0.0;
    double hi = 0.0;
    // Maximum change between consecutive waypoints. A step >= (hi - lo) makes
    // consecutive waypoints independent uniforms over [lo, hi]; a smaller step
    // turns the sequence into a clamped random walk inside the range. The z
    // default bounds per-second altitude excursions so generated sets match
    // the target length/speed statistics while still roaming the full range.
    double max_step = 1e9;
};

struct TrajGenConfig {
    std::array<DofRange, 6> ranges{};
    std::vector<int> waypoint_counts;  // admissible waypoint counts
    double duration = 10.0;            // seconds

    static TrajGenConfig training();  // counts 5..15
    static TrajGenConfig testing();   // counts 4..16
};

// Natural cubic interpolating spline (zero second derivative at both ends).
class NaturalCubicSpline {
public:
    NaturalCubicSpline() = default;
    // throws std::invalid_argument on duplicate/non-increasing knots or size mismatch
    static NaturalCubicSpline fit(std::vector<double> knots, std::vector<double> values);

    double value(double t) const;
    double derivative(double t) const;
    double second_derivative(double t) const;

    const std::vector<double>& knots() const { return t_; }
    const std::vector<double>& values_at_knots() const { return y_; }

private:
    std::vector<double> t_, y_, m_;  // m_: second derivatives at knots
    int segment(double t) const;
};

struct TrajectoryStats {
    double path_length = 0.0;    // m, translational
    double mean_speed = 0.0;     // m/s
    double mean_curvature = 0.0; // 1/m
};

// Interpolating 6-DoF trajectory over uniformly spaced knots on [0, T].
class PlatformTrajectory {
public:
    struct PoseVel {
        spatial::Vec3 position;
        spatial::EulerXYZ orientation;
        spatial::Vec3 linear_velocity;
        spatial::Vec3 angular_velocity;  // world frame
    };

    double duration() const { return duration_; }
    const std::vector<Waypoint6>& waypoints() const { return waypoints_; }
    const std::vector<double>& knot_times() const { return knots_; }

    // throws std::out_of_range for t outside [0, T]
    PoseVel query(double t) const;

    // raw per-DoF values for the platform PD tracker
    Vector6 value6(double t) const;
    Vector6 derivative6(double t) const;
    Vector6 second_derivative6(double t) const;

    friend PlatformTrajectory fit_interpolating_spline(const std::vector<Waypoint6>&, double);

private:
    std::array<NaturalCubicSpline, 6> splines_;
    std::vector<Waypoint6> waypoints_;
    std::vector<double> knots_;
    double duration_ = 0.0;

    void check_domain(double t) const;
};

// n waypoints, knot times uniform on [0, T] including endpoints.
// throws std::invalid_argument for n < 4
std::vector<Waypoint6> sample_waypoints(const TrajGenConfig& cfg, int n, Rng& rng);

PlatformTrajectory fit_interpolating_spline(const std::vector<Waypoint6>& wps, double duration);

// samples >= 1000; curvature samples with speed <= 1e-3 m/s are skipped
TrajectoryStats compute_stats(const PlatformTrajectory& traj, int samples);

// `count` independent trajectories. If level is set, every trajectory uses
// that waypoint count (curriculum); otherwise counts are drawn uniformly from
// cfg.waypoint_counts. Identical (cfg, seed, count, level) yield bit-identical
// sets.
std::vector<PlatformTrajectory> generate_set(const TrajGenConfig& cfg, int count,
                                             std::optional<int> level, uint64_t seed);

// Seeded single-trajectory variant used by environments and benchmarks.
PlatformTrajectory generate_one(const TrajGenConfig& cfg, std::optional<int> level, uint64_t seed);

// Plain-text table sampled at 100 Hz (header t,x,y,z,roll,pitch,yaw) plus a
// sidecar waypoint file carrying knot times; refitting from the sidecar
// reproduces the table within 1e-6.
void save_trajectory_table(const PlatformTrajectory& traj, const std::string& path);
void save_waypoint_sidecar(const PlatformTrajectory& traj, const std::string& path);
PlatformTrajectory load_from_waypoint_sidecar(const std::string& path);

}  // namespace quadbal::trajgen
