#include "evdrive/safety.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evdrive {

const char* to_string(FsmState s) {
    switch (s) {
        case FsmState::Driving: return "driving";
        case FsmState::StoppedAtRed: return "stopped_at_red";
        case FsmState::ForcedCrossover: return "forced_crossover";
    }
    return "driving";
}

const char* to_string(OverrideReason r) {
    switch (r) {
        case OverrideReason::None: return "none";
        case OverrideReason::RedLight: return "red_light";
        case OverrideReason::EmergencyBrake: return "emergency_brake";
        case OverrideReason::Overshoot: return "overshoot";
    }
    return "none";
}

bool tl_update(TrafficLightFsm& fsm, const TrafficLightBelief& belief, bool near_junction,
               double v, const SafetyParams& params) {
    if (belief.p_green > params.red_conf) {
        fsm = TrafficLightFsm{};  // confident green clears everything
        return false;
    }

    if (belief.p_red + belief.p_yellow > params.red_conf && near_junction) {
        fsm.red_counter += 1;
    } else {
        fsm.red_counter = std::max(0, fsm.red_counter - 1);
    }

    if (fsm.state == FsmState::ForcedCrossover) {
        if (!near_junction) fsm = TrafficLightFsm{};  // junction cleared
        return false;
    }

    bool must_stop = fsm.red_counter >= params.n_confirm;
    if (must_stop && v < 0.1) {
        fsm.state = FsmState::StoppedAtRed;
        fsm.stop_ticks += 1;
        if (fsm.stop_ticks > params.max_stop_ticks) {
            fsm.state = FsmState::ForcedCrossover;
            fsm.stop_ticks = 0;
            must_stop = false;
        }
    } else if (fsm.state == FsmState::StoppedAtRed && !must_stop) {
        fsm.state = FsmState::Driving;
        fsm.stop_ticks = 0;
    }
    return must_stop;
}

double HorizonClearances::at_time(double t) const {
    for (std::size_t i = 0; i < kHorizons.size(); ++i)
        if (kHorizons[i] == t) return d[i];
    throw std::invalid_argument("not a check horizon");
}

double HorizonClearances::min() const {
    double m = d[0];
    for (double v : d) m = std::min(m, v);
    return m;
}

HorizonClearances project_clearances(const std::vector<TrackedObject>& tracks,
                                     const std::vector<Vec2>& plan, const EgoState& ego,
                                     double ego_half_width, const SafetyParams& params) {
    if (plan.empty()) throw std::invalid_argument("clearance projection needs a plan");

    // The ego's future positions follow the plan from its current location.
    std::vector<Vec2> path;
    path.reserve(plan.size() + 1);
    path.push_back({ego.x, ego.y});
    path.insert(path.end(), plan.begin(), plan.end());
    const Polyline line{path};

    HorizonClearances out;
    for (std::size_t i = 0; i < HorizonClearances::kHorizons.size(); ++i) {
        const double t = HorizonClearances::kHorizons[i];
        const Vec2 p = line.point_at(ego.v * t);
        double best = params.d_free;
        for (const TrackedObject& trk : tracks) {
            const Obb box{{trk.x + trk.vx * t, trk.y + trk.vy * t},
                          trk.yaw,
                          trk.w / 2.0 + ego_half_width + params.inflate_margin,
                          trk.l / 2.0 + ego_half_width + params.inflate_margin};
            best = std::min(best, point_obb_distance(p, box));
        }
        out.d[i] = best;
    }
    return out;
}

double safe_distance(const HorizonClearances& clearances, double d_buffer) {
    double m = clearances.d[0] - d_buffer;
    for (double v : clearances.d) m = std::min(m, v - d_buffer);
    return m;
}

HorizonClearances apply_speed_buffer(const HorizonClearances& raw, double buffer) {
    HorizonClearances out = raw;
    for (double& v : out.d) v = std::max(0.0, v - buffer);
    return out;
}

double desired_speed(const HorizonClearances& buffered, double v_current, double v_max) {
    if (v_current < 0.0) throw std::invalid_argument("speed must be non-negative");
    const double d0 = buffered.at_time(0.0);
    if (d0 < std::max(3.0, v_current)) return 0.0;

    const double hard_brake = std::max(0.0, v_current - 2.5);
    const double near_term = 4.0 * buffered.at_time(0.5) - v_current - hard_brake;
    const double mid_term = 2.0 * buffered.at_time(1.0) - 0.5 * v_current - hard_brake;
    return std::max(0.0, std::min({v_max, near_term, mid_term}));
}

GateResult safety_gate(const ControlCommand& pid_cmd, bool must_stop, double v_cmd,
                       double v_current) {
    if (must_stop || v_cmd == 0.0) {
        GateResult r;
        r.cmd = ControlCommand{pid_cmd.steer, 0.0, 1.0};
        r.reason = must_stop ? OverrideReason::RedLight : OverrideReason::EmergencyBrake;
        return r;
    }
    if (v_current > v_cmd + 0.5) {
        const double overshoot = v_current - v_cmd;
        GateResult r;
        r.cmd = ControlCommand{pid_cmd.steer, 0.0, std::min(1.0, 0.4 * overshoot)};
        r.reason = OverrideReason::Overshoot;
        return r;
    }
    return GateResult{pid_cmd, OverrideReason::None};
}

}  // namespace evdrive
