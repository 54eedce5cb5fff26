#pragma once

#include <cstddef>
#include <string>

namespace evdrive {

// All tunables live here with their frozen defaults. A config file loaded via
// EVDRIVE_CONFIG (or --config) may override individual fields by name.

struct PhysicsParams {
    double dt = 0.05;            // fixed integration step [s]
    double wheelbase = 2.9;      // [m]
    double a_max = 3.0;          // full-throttle acceleration [m/s^2]
    double b_max = 8.0;          // full-brake deceleration [m/s^2]
    double steer_max = 0.6108652381980153;  // 35 degrees in radians
    double c_drag = 0.05;        // linear drag coefficient [1/s]
    double ego_length = 4.5;     // [m]
    double ego_width = 2.0;      // [m]
};

struct ControlParams {
    // Waypoint selection band along the local plan.
    double wp_near = 4.0;        // [m]
    double wp_far = 50.0;        // [m]
    // Lateral PID on heading error.
    double lat_kp = 1.0;
    double lat_ki = 0.05;
    double lat_kd = 0.2;
    // Longitudinal PID on speed error.
    double lon_kp = 0.5;
    double lon_ki = 0.1;
    double lon_kd = 0.05;
    double i_clamp = 2.0;        // anti-windup bound on the integral term
    // Curvature-based speed shaping.
    double v_curve_floor = 0.3;  // fraction of v_max kept in sharp turns
    double v_curve_gain = 1.5;   // heading-error penalty slope
};

struct SafetyParams {
    double v_max = 6.5;              // cruise speed cap [m/s]
    double clear_buffer = 2.5;       // subtracted for the safety readout [m]
    double speed_buffer = 2.0;       // subtracted before speed selection [m]
    double inflate_margin = 0.2;     // extra obstacle inflation [m]
    double d_free = 100.0;           // clearance when nothing is ahead [m]
    double red_conf = 0.7;           // probability mass needed to call a light
    int n_confirm = 3;               // consecutive detections before stopping
    int max_stop_ticks = 1000;       // forced crossover after this many
    double junction_radius = 15.0;   // light is "near" inside this arc range [m]
    double junction_passed = 10.0;   // arc distance past the light that clears it [m]
};

struct TrackingParams {
    double gate = 2.0;       // association distance gate [m]
    int t_drop = 5;          // unmatched ticks before a track is dropped
    double alpha = 0.4;      // confidence-weighted smoothing gain
};

struct PerceptionParams {
    int grid = 20;               // density map is grid x grid cells
    double cell = 1.0;           // cell edge [m]
    static constexpr int channels = 7;  // prob, dx, dy, w, l, heading, speed
};

struct EventParams {
    double threshold = 0.2;      // log-intensity contrast threshold
    double eps = 1.0 / 255.0;    // intensity floor before the log
    int width = 128;
    int height = 128;
};

struct FusionParams {
    int d_model = 256;
    int n_heads = 8;
    int n_layers = 6;
    int ffn_mult = 4;
};

struct LossParams {
    double lambda_wp = 0.2;
    double lambda_map = 0.5;
    double lambda_tf = 0.1;
};

struct ScoringParams {
    double pen_pedestrian = 0.50;
    double pen_vehicle = 0.60;
    double pen_layout = 0.65;
    double pen_red_light = 0.70;
    double pen_stop_sign = 0.80;
    double deviation_limit = 10.0;   // lateral route deviation [m]
    double blocked_speed = 0.1;      // below this the ego counts as blocked [m/s]
    double blocked_time = 90.0;      // seconds of standstill before "blocked"
};

struct SimParams {
    double timeout = 120.0;      // wall-clock scenario budget [s]
    double goal_radius = 2.0;    // completion tolerance around the route end [m]
};

struct Config {
    PhysicsParams physics;
    ControlParams control;
    SafetyParams safety;
    TrackingParams tracking;
    PerceptionParams perception;
    EventParams events;
    FusionParams fusion;
    LossParams loss;
    ScoringParams scoring;
    SimParams sim;
};

// Loads overrides from a key/value config file; unknown keys are an error.
// Returns the default config when `path` is empty.
Config load_config(const std::string& path);

namespace toml {
struct Table;
}

// Applies one section's worth of overrides (e.g. "physics", "control") onto
// an existing config. Scenario files reuse this for their override sections.
void apply_config_overrides(Config& cfg, const std::string& section, const toml::Table& table);

// Resolves the config path from the environment (EVDRIVE_CONFIG) unless an
// explicit path was given on the command line.
std::string resolve_config_path(const std::string& cli_path);

}  // namespace evdrive
