#include "evdrive/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evdrive {

double pid_step(PidState& pid, double error, double dt) {
    pid.integral = std::clamp(pid.integral + error * dt, -pid.i_clamp, pid.i_clamp);
    const double derivative = pid.has_prev ? (error - pid.prev_error) / dt : 0.0;
    pid.prev_error = error;
    pid.has_prev = true;
    return pid.kp * error + pid.ki * pid.integral + pid.kd * derivative;
}

Vec2 select_target_waypoint(const std::vector<Vec2>& waypoints, const Vec2& from,
                            double near, double far) {
    if (waypoints.empty()) throw std::invalid_argument("waypoint list is empty");

    const Vec2* best_in_band = nullptr;
    double best_band_dist = -1.0;
    const Vec2* best_beyond = nullptr;
    double best_beyond_dist = 0.0;
    for (const Vec2& w : waypoints) {
        const double d = distance(w, from);
        if (d >= near && d <= far && d > best_band_dist) {
            best_band_dist = d;
            best_in_band = &w;
        }
        if (d > near && (best_beyond == nullptr || d < best_beyond_dist)) {
            best_beyond_dist = d;
            best_beyond = &w;
        }
    }
    if (best_in_band) return *best_in_band;
    if (best_beyond) return *best_beyond;
    return waypoints.back();
}

Vec2 select_target_waypoint(const Route& route, const EgoState& ego, double near,
                            double far) {
    return select_target_waypoint(route.waypoints, {ego.x, ego.y}, near, far);
}

double heading_error(const EgoState& ego, const Vec2& target) {
    const double dx = target.x - ego.x;
    const double dy = target.y - ego.y;
    if (std::hypot(dx, dy) < 1e-12)
        throw std::invalid_argument("target waypoint coincides with the ego position");
    return wrap_angle(std::atan2(dy, dx) - ego.yaw);
}

double lateral_pid(PidState& pid, double theta_e, double dt) {
    return std::clamp(pid_step(pid, theta_e, dt), -1.0, 1.0);
}

ThrottleBrake longitudinal_pid(PidState& pid, double v_target, double v_current, double dt) {
    const double u = pid_step(pid, v_target - v_current, dt);
    if (v_target == 0.0 && v_current > 0.1) return {0.0, 1.0};
    return {std::clamp(u, 0.0, 1.0), std::clamp(-u, 0.0, 1.0)};
}

double curvature_speed(double v_max, double theta_e, const ControlParams& params) {
    return v_max * std::max(params.v_curve_floor, 1.0 - params.v_curve_gain * std::abs(theta_e));
}

}  // namespace evdrive
