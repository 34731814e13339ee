#include "quadbal/trajgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace quadbal::trajgen {

TrajGenConfig TrajGenConfig::training() {
    TrajGenConfig cfg;
    cfg.ranges[0] = {-1.0, 1.0, 1.2};   // x
    cfg.ranges[1] = {-1.0, 1.0, 1.2};   // y
    cfg.ranges[2] = {0.0, 5.0, 0.5};    // z
    cfg.ranges[3] = {-0.7, 0.7, 1.4};   // roll
    cfg.ranges[4] = {-0.7, 0.7, 1.4};   // pitch
    cfg.ranges[5] = {-2.6, 2.6, 5.2};   // yaw
    cfg.waypoint_counts.clear();
    for (int n = 5; n <= 15; ++n) cfg.waypoint_counts.push_back(n);
    cfg.duration = 10.0;
    return cfg;
}

TrajGenConfig TrajGenConfig::testing() {
    TrajGenConfig cfg = training();
    cfg.waypoint_counts.clear();
    for (int n = 4; n <= 16; ++n) cfg.waypoint_counts.push_back(n);
    return cfg;
}

NaturalCubicSpline NaturalCubicSpline::fit(std::vector<double> knots, std::vector<double> values) {
    const size_t n = knots.size();
    if (n < 2 || values.size() != n) {
        throw std::invalid_argument("spline fit needs >= 2 matching knots/values");
    }
    for (size_t i = 1; i < n; ++i) {
        if (!(knots[i] > knots[i - 1])) {
            throw std::invalid_argument("degenerate knots: times must be strictly increasing");
        }
    }
    NaturalCubicSpline s;
    s.t_ = std::move(knots);
    s.y_ = std::move(values);
    s.m_.assign(n, 0.0);
    if (n > 2) {
        // tridiagonal solve for interior second derivatives, natural ends
        const size_t m = n - 2;
        std::vector<double> a(m), b(m), c(m), d(m);
        for (size_t i = 0; i < m; ++i) {
            const double h0 = s.t_[i + 1] - s.t_[i];
            const double h1 = s.t_[i + 2] - s.t_[i + 1];
            a[i] = h0 / 6.0;
            b[i] = (h0 + h1) / 3.0;
            c[i] = h1 / 6.0;
            d[i] = (s.y_[i + 2] - s.y_[i + 1]) / h1 - (s.y_[i + 1] - s.y_[i]) / h0;
        }
        for (size_t i = 1; i < m; ++i) {
            const double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        s.m_[m] = d[m - 1] / b[m - 1];
        for (size_t i = m - 1; i-- > 0;) {
            s.m_[i + 1] = (d[i] - c[i] * s.m_[i + 2]) / b[i];
        }
    }
    return s;
}

int NaturalCubicSpline::segment(double t) const {
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    int i = int(it - t_.begin()) - 1;
    i = std::clamp(i, 0, int(t_.size()) - 2);
    return i;
}

double NaturalCubicSpline::value(double t) const {
    const int i = segment(t);
    const double h = t_[i + 1] - t_[i];
    const double u = t_[i + 1] - t, v = t - t_[i];
    return m_[i] * u * u * u / (6.0 * h) + m_[i + 1] * v * v * v / (6.0 * h) +
           (y_[i] / h - m_[i] * h / 6.0) * u + (y_[i + 1] / h - m_[i + 1] * h / 6.0) * v;
}

double NaturalCubicSpline::derivative(double t) const {
    const int i = segment(t);
    const double h = t_[i + 1] - t_[i];
    const double u = t_[i + 1] - t, v = t - t_[i];
    return -m_[i] * u * u / (2.0 * h) + m_[i + 1] * v * v / (2.0 * h) -
           (y_[i] / h - m_[i] * h / 6.0) + (y_[i + 1] / h - m_[i + 1] * h / 6.0);
}

double NaturalCubicSpline::second_derivative(double t) const {
    const int i = segment(t);
    const double h = t_[i + 1] - t_[i];
    return m_[i] * (t_[i + 1] - t) / h + m_[i + 1] * (t - t_[i]) / h;
}

std::vector<Waypoint6> sample_waypoints(const TrajGenConfig& cfg, int n, Rng& rng) {
    if (n < 4) throw std::invalid_argument("invalid waypoint count: need >= 4");
    std::vector<Waypoint6> wps(n);
    for (int d = 0; d < 6; ++d) {
        const DofRange& r = cfg.ranges[d];
        double v = rng.uniform(r.lo, r.hi);
        for (int k = 0; k < n; ++k) {
            wps[k][d] = v;
            if (r.max_step >= r.hi - r.lo) {
                v = rng.uniform(r.lo, r.hi);
            } else {
                v = std::clamp(v + rng.uniform(-r.max_step, r.max_step), r.lo, r.hi);
            }
        }
    }
    return wps;
}

PlatformTrajectory fit_interpolating_spline(const std::vector<Waypoint6>& wps, double duration) {
    if (wps.size() < 4) throw std::invalid_argument("invalid waypoint count: need >= 4");
    if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
    PlatformTrajectory traj;
    traj.duration_ = duration;
    traj.waypoints_ = wps;
    const size_t n = wps.size();
    traj.knots_.resize(n);
    for (size_t i = 0; i < n; ++i) traj.knots_[i] = duration * double(i) / double(n - 1);
    for (int d = 0; d < 6; ++d) {
        std::vector<double> vals(n);
        for (size_t i = 0; i < n; ++i) vals[i] = wps[i][d];
        traj.splines_[d] = NaturalCubicSpline::fit(traj.knots_, std::move(vals));
    }
    return traj;
}

void PlatformTrajectory::check_domain(double t) const {
    if (!(t >= 0.0 && t <= duration_)) {
        throw std::out_of_range("trajectory query time outside [0, T]");
    }
}

Vector6 PlatformTrajectory::value6(double t) const {
    check_domain(t);
    Vector6 out;
    for (int d = 0; d < 6; ++d) out[d] = splines_[d].value(t);
    return out;
}

Vector6 PlatformTrajectory::derivative6(double t) const {
    check_domain(t);
    Vector6 out;
    for (int d = 0; d < 6; ++d) out[d] = splines_[d].derivative(t);
    return out;
}

Vector6 PlatformTrajectory::second_derivative6(double t) const {
    check_domain(t);
    Vector6 out;
    for (int d = 0; d < 6; ++d) out[d] = splines_[d].second_derivative(t);
    return out;
}

PlatformTrajectory::PoseVel PlatformTrajectory::query(double t) const {
    const Vector6 pose = value6(t);
    const Vector6 rate = derivative6(t);
    PoseVel out;
    out.position = spatial::Vec3(pose[0], pose[1], pose[2]);
    out.orientation = spatial::EulerXYZ{pose[3], pose[4], pose[5]};
    out.linear_velocity = spatial::Vec3(rate[0], rate[1], rate[2]);
    out.angular_velocity =
        spatial::euler_rate_to_omega_matrix(out.orientation) * spatial::Vec3(rate[3], rate[4], rate[5]);
    return out;
}

TrajectoryStats compute_stats(const PlatformTrajectory& traj, int samples) {
    if (samples < 1000) throw std::invalid_argument("compute_stats needs samples >= 1000");
    const double T = traj.duration();
    TrajectoryStats st;
    spatial::Vec3 prev(traj.value6(0.0).head<3>());
    double curv_sum = 0.0;
    int curv_n = 0;
    for (int i = 1; i <= samples; ++i) {
        const double t = T * double(i) / double(samples);
        const spatial::Vec3 p(traj.value6(t).head<3>());
        st.path_length += (p - prev).norm();
        prev = p;
        const spatial::Vec3 vel(traj.derivative6(t).head<3>());
        const double speed = vel.norm();
        if (speed > 1e-3) {
            const spatial::Vec3 acc(traj.second_derivative6(t).head<3>());
            curv_sum += vel.cross(acc).norm() / (speed * speed * speed);
            ++curv_n;
        }
    }
    st.mean_speed = st.path_length / T;
    st.mean_curvature = curv_n > 0 ? curv_sum / curv_n : 0.0;
    return st;
}

std::vector<PlatformTrajectory> generate_set(const TrajGenConfig& cfg, int count,
                                             std::optional<int> level, uint64_t seed) {
    if (count < 1) throw std::invalid_argument("generate_set needs count >= 1");
    std::vector<PlatformTrajectory> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        out.push_back(generate_one(cfg, level, mix_seed(seed, 0x7261'6a00ull, uint64_t(i))));
    }
    return out;
}

PlatformTrajectory generate_one(const TrajGenConfig& cfg, std::optional<int> level, uint64_t seed) {
    Rng rng(seed);
    int n;
    if (level) {
        n = *level;
    } else {
        if (cfg.waypoint_counts.empty()) throw std::invalid_argument("empty waypoint-count set");
        n = cfg.waypoint_counts[size_t(rng.uniform_int(0, int64_t(cfg.waypoint_counts.size()) - 1))];
    }
    const auto wps = sample_waypoints(cfg, n, rng);
    return fit_interpolating_spline(wps, cfg.duration);
}

void save_trajectory_table(const PlatformTrajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trajectory table: " + path);
    out << "t,x,y,z,roll,pitch,yaw\n";
    char buf[256];
    const int steps = int(std::lround(traj.duration() * 100.0));
    for (int i = 0; i <= steps; ++i) {
        const double t = double(i) / 100.0;
        const Vector6 p = traj.value6(std::min(t, traj.duration()));
        std::snprintf(buf, sizeof buf, "%.6f,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", t, p[0], p[1],
                      p[2], p[3], p[4], p[5]);
        out << buf;
    }
}

void save_waypoint_sidecar(const PlatformTrajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write waypoint sidecar: " + path);
    out << "t,x,y,z,roll,pitch,yaw\n";
    char buf[256];
    for (size_t i = 0; i < traj.waypoints().size(); ++i) {
        const Waypoint6& w = traj.waypoints()[i];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      traj.knot_times()[i], w[0], w[1], w[2], w[3], w[4], w[5]);
        out << buf;
    }
}

PlatformTrajectory load_from_waypoint_sidecar(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read waypoint sidecar: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty waypoint sidecar: " + path);
    std::vector<Waypoint6> wps;
    std::vector<double> knots;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        double vals[7];
        for (int c = 0; c < 7; ++c) {
            if (!std::getline(ss, cell, ',')) {
                throw std::runtime_error("malformed waypoint sidecar row: " + line);
            }
            vals[c] = std::stod(cell);
        }
        knots.push_back(vals[0]);
        Waypoint6 w;
        for (int d = 0; d < 6; ++d) w[d] = vals[d + 1];
        wps.push_back(w);
    }
    if (wps.size() < 4) throw std::runtime_error("waypoint sidecar has fewer than 4 rows");
    return fit_interpolating_spline(wps, knots.back());
}

}  // namespace quadbal::trajgen
