#include "evdrive/agent.hpp"

#include <algorithm>
#include <cmath>

#include "evdrive/geometry.hpp"

namespace evdrive {

namespace {

PidState make_pid(double kp, double ki, double kd, double i_clamp) {
    PidState pid;
    pid.kp = kp;
    pid.ki = ki;
    pid.kd = kd;
    pid.i_clamp = i_clamp;
    return pid;
}

bool noise_active(const NoiseConfig& n) {
    return n.p_miss > 0.0 || n.p_fp > 0.0 || n.jitter_sigma > 0.0 || n.conf_lo < 1.0 ||
           n.conf_hi < 1.0 || n.tl_flip > 0.0;
}

}  // namespace

Agent::Agent(const Config& config, std::uint64_t seed, const NoiseConfig& noise)
    : config_(config),
      noise_(noise),
      rng_(seed),
      tracker_(config.tracking),
      lat_(make_pid(config.control.lat_kp, config.control.lat_ki, config.control.lat_kd,
                    config.control.i_clamp)),
      lon_(make_pid(config.control.lon_kp, config.control.lon_ki, config.control.lon_kd,
                    config.control.i_clamp)) {}

void Agent::reset(std::uint64_t seed) {
    rng_ = Rng(seed);
    tracker_.reset();
    fsm_ = TrafficLightFsm{};
    lat_.reset();
    lon_.reset();
    last_ = PerceptionOutput{};
    ticks_ = 0;
}

TickResult Agent::tick(const WorldState& world) {
    const double dt = config_.physics.dt;
    const int r = config_.perception.grid;
    const EgoState& ego = world.ego;
    const Vec2 ego_pos{ego.x, ego.y};

    // 1. Perceive: clean oracle, then the corrupted channel the agent acts on.
    PerceptionOutput clean = perceive(world, config_.perception, config_.safety, 0.0, rng_);
    PerceptionOutput active = clean;
    if (noise_active(noise_)) {
        active = corrupt(clean, noise_, r, rng_);
        if (noise_.tl_flip > 0.0) active.tl = tl_belief(world, noise_.tl_flip, rng_);
    }
    last_ = active;

    // 2. Track, in the world frame so coasting survives ego motion.
    std::vector<Detection> world_dets;
    world_dets.reserve(active.detections.size());
    for (const Detection& d : active.detections) {
        Detection wd = d;
        const Vec2 p = frame_to_world({d.x, d.y}, ego_pos, ego.yaw);
        const Vec2 v = rotate({d.vx, d.vy}, ego.yaw);
        wd.x = p.x;
        wd.y = p.y;
        wd.vx = v.x;
        wd.vy = v.y;
        wd.yaw = wrap_angle(d.yaw + ego.yaw);
        world_dets.push_back(wd);
    }
    tracker_.update(world_dets, dt);

    // 3. Local plan and steering.
    std::vector<Vec2> plan;
    plan.reserve(active.waypoints.size());
    for (const Vec2& wp : active.waypoints) plan.push_back(frame_to_world(wp, ego_pos, ego.yaw));
    const Vec2 target = select_target_waypoint(plan, ego_pos, config_.control.wp_near,
                                               config_.control.wp_far);
    const double theta_e = heading_error(ego, target);
    const double steer = lateral_pid(lat_, theta_e, dt);

    // 4. Clearance rollout and speed selection.
    const HorizonClearances clearances = project_clearances(
        tracker_.tracks(), plan, ego, config_.physics.ego_width / 2.0, config_.safety);
    const double d_safe = safe_distance(clearances, config_.safety.clear_buffer);
    const HorizonClearances buffered =
        apply_speed_buffer(clearances, config_.safety.speed_buffer);
    const double v_cmd = desired_speed(buffered, ego.v, config_.safety.v_max);
    const double v_curve = curvature_speed(config_.safety.v_max, theta_e, config_.control);
    const double v_target = std::min(v_curve, v_cmd);
    const ThrottleBrake tb = longitudinal_pid(lon_, v_target, ego.v, dt);

    // 5. Traffic-light policy, then the gate gets the last word.
    const bool near_junction = active.junction_prob > 0.5;
    const bool must_stop = tl_update(fsm_, active.tl, near_junction, ego.v, config_.safety);
    const GateResult gate =
        safety_gate({steer, tb.throttle, tb.brake}, must_stop, v_cmd, ego.v);

    // 6. Perception-quality losses for the trace.
    LossWeights lw;
    lw.lambda_pt = config_.loss.lambda_wp;
    lw.lambda_map = config_.loss.lambda_map;
    lw.lambda_tf = config_.loss.lambda_tf;
    TickLosses losses;
    losses.waypoint = waypoint_loss(active.waypoints, clean.waypoints);
    losses.prob = prob_loss_balanced(active.density, clean.density);
    losses.meta = meta_loss(active.density, clean.density);
    const TrafficInfoPred pred{active.tl.p_red + active.tl.p_yellow, 0.0, active.junction_prob};
    const TrafficInfoTruth truth{clean.tl.p_red + clean.tl.p_yellow > 0.5, false,
                                 clean.junction_prob > 0.5};
    losses.traffic = traffic_info_loss(pred, truth, lw);
    losses.total = total_loss(losses.waypoint, losses.prob + losses.meta, losses.traffic, lw);

    TraceRecord rec;
    rec.tick = ticks_++;
    rec.ego = ego;
    rec.theta_e = theta_e;
    rec.v_cmd = v_cmd;
    rec.v_target = v_target;
    rec.d_safe = d_safe;
    rec.command = gate.cmd;
    rec.fsm = fsm_.state;
    rec.override_reason = gate.reason;
    rec.detections = static_cast<int>(active.detections.size());
    rec.tracks = static_cast<int>(tracker_.tracks().size());
    rec.losses = losses;
    return TickResult{gate.cmd, rec};
}

}  // namespace evdrive
