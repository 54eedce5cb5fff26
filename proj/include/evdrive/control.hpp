#pragma once

#include <vector>

#include "evdrive/config.hpp"
#include "evdrive/geometry.hpp"
#include "evdrive/world.hpp"

namespace evdrive {

struct PidState {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
    double i_clamp = 2.0;
    double integral = 0.0;
    double prev_error = 0.0;
    bool has_prev = false;

    void reset() {
        integral = 0.0;
        prev_error = 0.0;
        has_prev = false;
    }
};

// One discrete PID step: integral accumulates error*dt (clamped to
// +/- i_clamp), derivative is the backward difference (0 on the first call).
double pid_step(PidState& pid, double error, double dt);

// Furthest waypoint with distance in [near, far] from `from`; if the band is
// empty, the nearest one with distance > near; failing that, the last point.
Vec2 select_target_waypoint(const std::vector<Vec2>& waypoints, const Vec2& from,
                            double near, double far);
Vec2 select_target_waypoint(const Route& route, const EgoState& ego, double near,
                            double far);

// Shortest signed angle from the ego heading to the bearing of the target,
// in (-pi, pi]. Throws if the target coincides with the ego position.
double heading_error(const EgoState& ego, const Vec2& target);

// Steering in [-1, 1] from the heading error.
double lateral_pid(PidState& pid, double theta_e, double dt);

struct ThrottleBrake {
    double throttle = 0.0;
    double brake = 0.0;
};

// Sign-split longitudinal control: positive PID output drives the throttle,
// negative the brake. A zero speed target with the vehicle still moving
// becomes a full-brake stop regardless of the PID output.
ThrottleBrake longitudinal_pid(PidState& pid, double v_target, double v_current, double dt);

// Curvature speed shaping: sharp heading errors cut the allowed speed, never
// below the configured floor fraction of v_max.
double curvature_speed(double v_max, double theta_e, const ControlParams& params);

}  // namespace evdrive
